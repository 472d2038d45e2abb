#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dfdse/model.hpp"

namespace dfdse {

class MrbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index state of a multi-reader buffer. Payloads are not stored.
class MrbState {
 public:
  MrbState(int capacity, std::vector<std::string> readers);

  int capacity() const { return capacity_; }
  int write_index() const { return write_; }
  const IdMap<int>& read_indices() const { return read_; }
  int read_index(const std::string& reader) const;

  /// Builds a state from explicit indices; used to seed tests and replays.
  static MrbState from_indices(int capacity, int write_index, IdMap<int> read_indices);

  bool operator==(const MrbState&) const = default;

 private:
  MrbState() = default;
  friend MrbState fire_writer(const MrbState&, int);
  friend MrbState fire_reader(const MrbState&, const std::string&, int);

  int capacity_ = 1;
  int write_ = 0;
  IdMap<int> read_;
};

int available_tokens(const MrbState& s, const std::string& reader);
int free_places(const MrbState& s);
MrbState fire_writer(const MrbState& s, int produced);
MrbState fire_reader(const MrbState& s, const std::string& reader, int consumed);

}  // namespace dfdse
