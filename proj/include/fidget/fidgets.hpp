#pragma once

#include "fidget/adaptors.hpp"
#include "fidget/motion.hpp"
#include "fidget/pose.hpp"

#include <array>
#include <string>
#include <vector>

namespace fidget {

// Row order of the fidget matrix.
enum FidgetRow : std::size_t {
  kChf = 0,
  kShfLegLeft,
  kShfLegRight,
  kShfArmLeft,
  kShfArmRight,
  kShfFaceLeft,
  kShfFaceRight,
  kLff,
  kSpeakingRow,
};
inline constexpr std::size_t kPureFidgetRows = 8;
const std::array<std::string, 9>& fidget_row_names();

// Binary rows x N frames: 8 rows (pure) or 9 with the speaking row.
struct FidgetMatrix {
  std::vector<std::vector<std::uint8_t>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t frames() const { return rows.empty() ? 0 : rows.front().size(); }
  bool has_speaking() const { return rows.size() == kPureFidgetRows + 1; }
  std::vector<std::string> names() const;
  bool operator==(const FidgetMatrix&) const = default;
};

// Action label of one classified slice.
struct SliceAction {
  SliceCategory category = SliceCategory::kBoth;
  std::size_t start = 0;
  std::size_t length = 100;
  ActionLabel label = ActionLabel::kStatic;

  double center() const { return static_cast<double>(start) + static_cast<double>(length - 1) / 2.0; }
};

// Per-frame action of one channel resolved from its slices; -1 where no
// slice applies.
struct ChannelActions {
  std::vector<int> both, left, right, legs;
};

// Frames covered by two slices take the label of the slice whose centre is
// nearer (ties go to DYNAMIC). Frames of a run after its last slice inherit
// that slice's label. Runs without slices stay -1.
ChannelActions resolve_actions(const LocationTimeline& timeline, const std::vector<SliceAction>& actions);

FidgetMatrix encode_fidgets(const LocationTimeline& timeline, const std::vector<SliceAction>& actions);

// Appends the speaking row. Throws DataError on a length mismatch or when the
// matrix already carries one.
FidgetMatrix attach_speaking(const FidgetMatrix& m, const SpeakingTrack& speaking);
FidgetMatrix strip_speaking(const FidgetMatrix& m);

// One column per row, one line per frame, preceded by a `frame` column.
std::string format_fidget_csv(const FidgetMatrix& m);

}  // namespace fidget
