#pragma once

// Binary min-heap over dense integer ids with a position index, so keys can be
// changed or entries removed in O(log n). Equal keys pop in ascending id order.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace holoscope {

class IndexedMinHeap {
 public:
  explicit IndexedMinHeap(std::size_t id_capacity = 0) : pos_(id_capacity, npos) {}

  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  bool contains(std::uint32_t id) const { return id < pos_.size() && pos_[id] != npos; }
  double key(std::uint32_t id) const { return keys_.at(at(id)); }

  void push(std::uint32_t id, double key) {
    if (id >= pos_.size()) pos_.resize(id + 1, npos);
    if (pos_[id] != npos) throw std::logic_error("id already in heap");
    pos_[id] = heap_.size();
    heap_.push_back(id);
    keys_.push_back(key);
    sift_up(heap_.size() - 1);
  }

  /// Changes the key of a live id.
  void update(std::uint32_t id, double key) {
    const std::size_t i = at(id);
    keys_[i] = key;
    sift_up(i);
    sift_down(pos_[id]);
  }

  void erase(std::uint32_t id) {
    const std::size_t i = at(id);
    swap_nodes(i, heap_.size() - 1);
    pos_[id] = npos;
    heap_.pop_back();
    keys_.pop_back();
    if (i < heap_.size()) {
      sift_up(i);
      sift_down(pos_[heap_[i]]);
    }
  }

  std::pair<std::uint32_t, double> top() const {
    if (heap_.empty()) throw std::logic_error("pop from empty heap");
    return {heap_[0], keys_[0]};
  }

  std::pair<std::uint32_t, double> pop() {
    auto out = top();
    erase(out.first);
    return out;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t at(std::uint32_t id) const {
    if (!contains(id)) throw std::logic_error("id not in heap");
    return pos_[id];
  }

  bool less(std::size_t a, std::size_t b) const {
    return keys_[a] < keys_[b] || (keys_[a] == keys_[b] && heap_[a] < heap_[b]);
  }

  void swap_nodes(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    std::swap(keys_[a], keys_[b]);
    pos_[heap_[a]] = a;
    pos_[heap_[b]] = b;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(i, parent)) break;
      swap_nodes(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    while (true) {
      const std::size_t l = 2 * i + 1, r = l + 1;
      std::size_t m = i;
      if (l < heap_.size() && less(l, m)) m = l;
      if (r < heap_.size() && less(r, m)) m = r;
      if (m == i) break;
      swap_nodes(i, m);
      i = m;
    }
  }

  std::vector<std::uint32_t> heap_;
  std::vector<double> keys_;
  std::vector<std::size_t> pos_;
};

}  // namespace holoscope
