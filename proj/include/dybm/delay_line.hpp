#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dybm {

// Fixed-length FIFO of spike bits modelling an axon with conduction delay d.
// Holds the last d-1 values of the pre-synaptic unit: lag 1 at the front,
// lag d-1 at the back. A zero-length line passes its input straight through.
class DelayLine {
 public:
  DelayLine() = default;
  explicit DelayLine(std::size_t length) : bits_(length, 0) {}

  std::size_t size() const noexcept { return bits_.size(); }

  // Value seen `lag` steps ago, 1 <= lag <= size().
  std::uint8_t lag(std::size_t lag) const {
    assert(lag >= 1 && lag <= bits_.size());
    std::size_t idx = head_ + lag - 1;
    if (idx >= bits_.size()) idx -= bits_.size();
    return bits_[idx];
  }

  // Inserts `bit` at the front and returns the value evicted from the back.
  std::uint8_t push(std::uint8_t bit) {
    if (bits_.empty()) return bit;
    head_ = head_ == 0 ? bits_.size() - 1 : head_ - 1;
    const std::uint8_t evicted = bits_[head_];
    bits_[head_] = bit;
    return evicted;
  }

  // Front-to-back copy (lag 1 first).
  std::vector<std::uint8_t> contents() const {
    std::vector<std::uint8_t> out(bits_.size());
    for (std::size_t d = 1; d <= bits_.size(); ++d) out[d - 1] = lag(d);
    return out;
  }

  void assign(const std::vector<std::uint8_t>& front_to_back) {
    assert(front_to_back.size() == bits_.size());
    bits_ = front_to_back;
    head_ = 0;
  }

  friend bool operator==(const DelayLine& a, const DelayLine& b) {
    return a.contents() == b.contents();
  }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t head_ = 0;
};

}  // namespace dybm
