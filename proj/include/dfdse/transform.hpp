#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dfdse/model.hpp"

namespace dfdse {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MrbParams {
  int delay = 0;
  int capacity = 1;
  Bytes token_bytes = 1;
  bool operator==(const MrbParams&) const = default;
};

/// Selection of multi-cast actors to replace; keys must equal detect_multicast(app).
using ReplacementFunction = IdMap<bool>;

MrbParams mrb_channel_params(const Channel& in, const std::vector<Channel>& outs);

/// Id of a merged channel: component ids of all replaced channels, sorted, joined by '+'.
std::string mrb_id(const std::vector<std::string>& channel_ids);

ApplicationGraph substitute_mrbs(const ApplicationGraph& app, const ReplacementFunction& xi);

/// Parses "0110"-style bit strings against detect_multicast order.
ReplacementFunction replacement_from_bits(const ApplicationGraph& app, const std::string& bits);

}  // namespace dfdse
