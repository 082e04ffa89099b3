// Straight-road Nagel-Schreckenberg reference with p = 0, written from the
// rule set alone: everybody picks min(v + 1, v_max, free cells to the car in
// front) from the same snapshot, then everybody moves. Cars leaving the end go
// to the back of a FIFO queue and come back at cell 0, speed 0, whenever cell 0
// is free after the move.

#pragma once

#include <algorithm>
#include <deque>
#include <tuple>
#include <vector>

namespace oracle {

struct Car {
  int id = 0;
  int cell = 0;
  int speed = 0;
  friend bool operator==(const Car&, const Car&) = default;
  friend bool operator<(const Car& a, const Car& b) {
    return std::tie(a.cell, a.id) < std::tie(b.cell, b.id);
  }
};

class Road {
 public:
  Road(int length, int v_max, std::vector<Car> cars, bool reinject)
      : length_(length), v_max_(v_max), cars_(std::move(cars)), reinject_(reinject) {
    std::sort(cars_.begin(), cars_.end());
  }

  void step() {
    const std::vector<Car> before = cars_;
    std::vector<Car> after;
    std::vector<int> left;
    for (std::size_t i = 0; i < before.size(); ++i) {
      const Car& c = before[i];
      const bool has_leader = i + 1 < before.size();
      const int gap = has_leader ? before[i + 1].cell - c.cell - 1 : 1 << 20;
      const int v = std::min({c.speed + 1, v_max_, gap});
      const int x = c.cell + v;
      if (x >= length_) {
        left.push_back(c.id);
      } else {
        after.push_back({c.id, x, v});
      }
    }
    // Front car leaves first.
    for (auto it = left.rbegin(); it != left.rend(); ++it) queue_.push_back(*it);
    if (reinject_ && !queue_.empty() &&
        std::none_of(after.begin(), after.end(), [](const Car& c) { return c.cell == 0; })) {
      after.push_back({queue_.front(), 0, 0});
      queue_.pop_front();
    }
    std::sort(after.begin(), after.end());
    cars_ = std::move(after);
  }

  const std::vector<Car>& cars() const { return cars_; }
  const std::deque<int>& queue() const { return queue_; }

 private:
  int length_;
  int v_max_;
  std::vector<Car> cars_;
  std::deque<int> queue_;
  bool reinject_;
};

}  // namespace oracle
