#include "dfdse/transform.hpp"

#include <algorithm>
#include <sstream>

namespace dfdse {

MrbParams mrb_channel_params(const Channel& in, const std::vector<Channel>& outs) {
  if (outs.empty()) throw TransformError("multi-cast family without output channels");
  for (const auto& o : outs) {
    if (o.token_bytes != in.token_bytes) throw TransformError("token sizes differ on " + o.id);
    if (o.delay != 0) throw TransformError("output channel " + o.id + " carries initial tokens");
    if (o.capacity != outs.front().capacity) throw TransformError("output capacities differ on " + o.id);
  }
  return MrbParams{in.delay, in.capacity + outs.front().capacity, in.token_bytes};
}

std::string mrb_id(const std::vector<std::string>& channel_ids) {
  std::vector<std::string> parts;
  for (const auto& id : channel_ids) {
    std::stringstream ss(id);
    std::string part;
    while (std::getline(ss, part, '+')) parts.push_back(part);
  }
  std::sort(parts.begin(), parts.end(), IdLess{});
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '+';
    out += p;
  }
  return out;
}

ApplicationGraph substitute_mrbs(const ApplicationGraph& app, const ReplacementFunction& xi) {
  IdSet multicast = detect_multicast(app);
  IdSet domain;
  for (const auto& [a, on] : xi) domain.insert(a);
  if (domain != multicast) throw TransformError("replacement function domain differs from the multi-cast actors");

  ApplicationGraph g = app;
  for (const auto& [am, on] : xi) {
    if (!on) continue;
    auto ins = g.inputs(am);
    auto outs = g.outputs(am);
    if (ins.size() != 1 || outs.empty()) throw TransformError("actor " + am + " is no longer a multi-cast actor");
    const Channel cin = g.channel(ins.front());
    std::vector<Channel> out_channels;
    for (const auto& o : outs) out_channels.push_back(g.channel(o));
    MrbParams p = mrb_channel_params(cin, out_channels);

    std::vector<std::string> deleted{cin.id};
    deleted.insert(deleted.end(), outs.begin(), outs.end());
    Channel m;
    m.id = mrb_id(deleted);
    m.delay = p.delay;
    m.capacity = p.capacity;
    m.token_bytes = p.token_bytes;
    m.is_mrb = true;
    m.decision_from = cin.decision_from.empty() ? cin.id : cin.decision_from;

    std::vector<std::string> producers;
    for (const auto& a : g.producers(cin.id))
      if (a != am) producers.push_back(a);
    std::vector<std::string> readers;
    for (const auto& c : deleted)
      for (const auto& a : g.consumers(c))
        if (a != am) readers.push_back(a);

    for (const auto& c : deleted) g.remove_channel(c);
    g.remove_actor(am);
    g.add_channel(m);
    for (const auto& a : producers) g.add_write(a, m.id);
    for (const auto& a : readers) g.add_read(m.id, a);
  }
  return g;
}

ReplacementFunction replacement_from_bits(const ApplicationGraph& app, const std::string& bits) {
  IdSet multicast = detect_multicast(app);
  if (bits.size() != multicast.size())
    throw TransformError("expected " + std::to_string(multicast.size()) + " replacement bits, got " +
                         std::to_string(bits.size()));
  ReplacementFunction xi;
  std::size_t i = 0;
  for (const auto& a : multicast) {
    char b = bits[i++];
    if (b != '0' && b != '1') throw TransformError("replacement bits must be 0 or 1");
    xi[a] = b == '1';
  }
  return xi;
}

}  // namespace dfdse
