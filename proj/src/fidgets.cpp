#include "fidget/fidgets.hpp"

#include "fidget/errors.hpp"

#include <cmath>
#include <sstream>

namespace fidget {

const std::array<std::string, 9>& fidget_row_names() {
  static const std::array<std::string, 9> kNames = {
      "CHF",          "SHF-L(left)",  "SHF-L(right)", "SHF-A(left)", "SHF-A(right)",
      "SHF-F(left)",  "SHF-F(right)", "LFF",          "speaking"};
  return kNames;
}

std::vector<std::string> FidgetMatrix::names() const {
  const auto& all = fidget_row_names();
  return {all.begin(), all.begin() + static_cast<long>(rows.size())};
}

namespace {

// Resolves frame labels for the runs of one channel selected by `include`.
template <typename Pred>
std::vector<int> resolve_channel(const std::vector<LocationCode>& channel, Pred include,
                                 const std::vector<const SliceAction*>& slices) {
  const std::size_t n = channel.size();
  std::vector<int> out(n, -1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && channel[j] == channel[i]) ++j;
    if (include(channel[i])) {
      std::vector<const SliceAction*> in_run;
      for (const auto* s : slices)
        if (s->start >= i && s->start + s->length <= j) in_run.push_back(s);
      if (!in_run.empty()) {
        const SliceAction* last = in_run.front();
        for (const auto* s : in_run)
          if (s->start > last->start) last = s;
        for (std::size_t t = i; t < j; ++t) {
          const SliceAction* best = nullptr;
          double best_d = 0.0;
          for (const auto* s : in_run) {
            if (t < s->start || t >= s->start + s->length) continue;
            const double d = std::abs(static_cast<double>(t) - s->center());
            if (!best || d < best_d ||
                (d == best_d && s->label == ActionLabel::kDynamic)) {
              best = s;
              best_d = d;
            }
          }
          if (!best && t >= last->start + last->length) best = last;
          if (best) out[t] = best->label == ActionLabel::kDynamic ? 1 : 0;
        }
      }
    }
    i = j;
  }
  return out;
}

}  // namespace

ChannelActions resolve_actions(const LocationTimeline& timeline, const std::vector<SliceAction>& actions) {
  std::array<std::vector<const SliceAction*>, 4> by_cat;
  for (const auto& a : actions) {
    if (a.length == 0) throw DataError("slice action with zero length");
    by_cat[static_cast<std::size_t>(a.category)].push_back(&a);
  }
  const auto is_h2h = [](LocationCode c) { return c == LocationCode::kH2H; };
  const auto not_h2h = [](LocationCode c) { return c != LocationCode::kH2H; };
  ChannelActions out;
  out.both = resolve_channel(timeline.left_hand, is_h2h, by_cat[0]);
  out.left = resolve_channel(timeline.left_hand, not_h2h, by_cat[1]);
  out.right = resolve_channel(timeline.right_hand, not_h2h, by_cat[2]);
  out.legs = resolve_channel(timeline.legs, [](LocationCode) { return true; }, by_cat[3]);
  return out;
}

FidgetMatrix encode_fidgets(const LocationTimeline& timeline, const std::vector<SliceAction>& actions) {
  const std::size_t n = timeline.size();
  if (timeline.left_hand.size() != n || timeline.right_hand.size() != n)
    throw DataError("encode_fidgets: timeline channels differ in length");
  const auto act = resolve_actions(timeline, actions);
  FidgetMatrix m;
  m.rows.assign(kPureFidgetRows, std::vector<std::uint8_t>(n, 0));
  const auto hand_row = [](LocationCode c, bool left) -> int {
    switch (c) {
      case LocationCode::kH2L: return left ? kShfLegLeft : kShfLegRight;
      case LocationCode::kH2A: return left ? kShfArmLeft : kShfArmRight;
      case LocationCode::kH2F: return left ? kShfFaceLeft : kShfFaceRight;
      default: return -1;
    }
  };
  for (std::size_t t = 0; t < n; ++t) {
    if (timeline.left_hand[t] == LocationCode::kH2H) {
      if (act.both[t] == 1) m.rows[kChf][t] = 1;
    } else {
      const int rl = hand_row(timeline.left_hand[t], true);
      if (rl >= 0 && act.left[t] == 1) m.rows[static_cast<std::size_t>(rl)][t] = 1;
      const int rr = hand_row(timeline.right_hand[t], false);
      if (rr >= 0 && act.right[t] == 1) m.rows[static_cast<std::size_t>(rr)][t] = 1;
    }
    if (act.legs[t] == 1) m.rows[kLff][t] = 1;
  }
  return m;
}

FidgetMatrix attach_speaking(const FidgetMatrix& m, const SpeakingTrack& speaking) {
  if (m.row_count() != kPureFidgetRows) throw DataError("attach_speaking: expected an 8-row fidget matrix");
  if (speaking.speaking.size() != m.frames()) {
    throw DataError("attach_speaking: speaking track has " + std::to_string(speaking.speaking.size()) +
                    " frames, fidget matrix " + std::to_string(m.frames()));
  }
  FidgetMatrix out = m;
  auto& row = out.rows.emplace_back(speaking.speaking);
  for (auto& v : row) v = v ? 1 : 0;
  return out;
}

FidgetMatrix strip_speaking(const FidgetMatrix& m) {
  FidgetMatrix out = m;
  if (out.has_speaking()) out.rows.pop_back();
  return out;
}

std::string format_fidget_csv(const FidgetMatrix& m) {
  std::ostringstream out;
  out << "frame";
  for (const auto& name : m.names()) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < m.frames(); ++t) {
    out << t;
    for (const auto& row : m.rows) out << ',' << static_cast<int>(row[t]);
    out << '\n';
  }
  return out.str();
}

}  // namespace fidget
