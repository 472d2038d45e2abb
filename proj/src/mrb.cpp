#include "dfdse/mrb.hpp"

#include <algorithm>

namespace dfdse {

namespace {

int mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

MrbState::MrbState(int capacity, std::vector<std::string> readers) : capacity_(capacity) {
  if (capacity < 1) throw MrbError("capacity must be at least 1");
  if (readers.empty()) throw MrbError("an MRB needs at least one reader");
  for (auto& r : readers)
    if (!read_.emplace(std::move(r), -1).second) throw MrbError("reader registered twice");
}

MrbState MrbState::from_indices(int capacity, int write_index, IdMap<int> read_indices) {
  if (capacity < 1) throw MrbError("capacity must be at least 1");
  if (write_index < 0 || write_index >= capacity) throw MrbError("write index out of range");
  if (read_indices.empty()) throw MrbError("an MRB needs at least one reader");
  for (const auto& [r, i] : read_indices)
    if (i < -1 || i >= capacity) throw MrbError("read index out of range for " + r);
  MrbState s;
  s.capacity_ = capacity;
  s.write_ = write_index;
  s.read_ = std::move(read_indices);
  return s;
}

int MrbState::read_index(const std::string& reader) const {
  auto it = read_.find(reader);
  if (it == read_.end()) throw MrbError("unknown reader: " + reader);
  return it->second;
}

int available_tokens(const MrbState& s, const std::string& reader) {
  int rho = s.read_index(reader);
  if (rho == -1) return 0;
  return mod(s.write_index() - rho - 1, s.capacity()) + 1;
}

int free_places(const MrbState& s) {
  int most = 0;
  for (const auto& [r, rho] : s.read_indices()) most = std::max(most, available_tokens(s, r));
  return s.capacity() - most;
}

MrbState fire_writer(const MrbState& s, int produced) {
  if (produced < 0) throw MrbError("negative produce count");
  if (produced > s.capacity()) throw MrbError("produce count exceeds capacity");
  if (free_places(s) < produced) throw MrbError("insufficient free places");
  if (produced == 0) return s;
  MrbState n = s;
  for (auto& [r, rho] : n.read_)
    if (rho == -1) rho = s.write_;
  n.write_ = mod(s.write_ + produced, s.capacity_);
  return n;
}

MrbState fire_reader(const MrbState& s, const std::string& reader, int consumed) {
  if (consumed < 0) throw MrbError("negative consume count");
  int avail = available_tokens(s, reader);
  if (avail < consumed) throw MrbError("insufficient tokens for reader " + reader);
  if (consumed == 0) return s;
  MrbState n = s;
  int& rho = n.read_.find(reader)->second;
  rho = avail == consumed ? -1 : mod(rho + consumed, s.capacity_);
  return n;
}

}  // namespace dfdse
