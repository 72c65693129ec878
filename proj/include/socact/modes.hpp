#ifndef SOCACT_MODES_HPP
#define SOCACT_MODES_HPP

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socact/common.hpp"

namespace socact {

/// The four atomic modes of political action (actor scale x action manner)
/// followed by the five collapsed unions reported alongside them.
enum class ActionMode : std::uint8_t {
  SingularPeace = 0,
  SingularForce,
  CollectivePeace,
  CollectiveForce,
  Collective,
  Singular,
  Force,
  Peace,
  All,
};

inline constexpr std::size_t kModeCount = 9;
inline constexpr std::size_t kAtomicModeCount = 4;

inline constexpr std::array<ActionMode, kModeCount> kAllModes = {
    ActionMode::SingularPeace,   ActionMode::SingularForce,
    ActionMode::CollectivePeace, ActionMode::CollectiveForce,
    ActionMode::Collective,      ActionMode::Singular,
    ActionMode::Force,           ActionMode::Peace,
    ActionMode::All,
};

inline constexpr std::array<ActionMode, kAtomicModeCount> kAtomicModes = {
    ActionMode::SingularPeace, ActionMode::SingularForce,
    ActionMode::CollectivePeace, ActionMode::CollectiveForce};

/// Row order of the evaluation table: atomic modes first, then the
/// less-refined unions.
inline constexpr std::array<ActionMode, kModeCount> kReportOrder = {
    ActionMode::CollectiveForce, ActionMode::CollectivePeace,
    ActionMode::SingularForce,   ActionMode::SingularPeace,
    ActionMode::Collective,      ActionMode::Singular,
    ActionMode::Force,           ActionMode::Peace,
    ActionMode::All,
};

constexpr std::size_t index_of(ActionMode m) { return static_cast<std::size_t>(m); }

constexpr bool is_atomic(ActionMode m) { return index_of(m) < kAtomicModeCount; }

inline constexpr std::array<std::string_view, kModeCount> kModeNames = {
    "singular_peace", "singular_force", "collective_peace", "collective_force",
    "collective",     "singular",       "force",            "peace",
    "all"};

inline constexpr std::array<std::string_view, kModeCount> kModeTitles = {
    "Singular peace", "Singular force", "Collective peace", "Collective force",
    "Collective",     "Singular",       "Force",            "Peace",
    "All"};

constexpr std::string_view mode_name(ActionMode m) { return kModeNames[index_of(m)]; }
constexpr std::string_view mode_title(ActionMode m) { return kModeTitles[index_of(m)]; }

inline std::optional<ActionMode> parse_mode(std::string_view name) {
  for (std::size_t i = 0; i < kModeCount; ++i) {
    if (kModeNames[i] == name) return static_cast<ActionMode>(i);
  }
  return std::nullopt;
}

inline ActionMode require_mode(std::string_view name) {
  if (auto m = parse_mode(name)) return *m;
  throw Error("unknown-mode", "unknown action mode: " + std::string(name));
}

/// Small bit set over the nine modes.
class ModeSet {
 public:
  constexpr ModeSet() = default;
  constexpr ModeSet(std::initializer_list<ActionMode> modes) {
    for (auto m : modes) insert(m);
  }

  static constexpr ModeSet from_bits(std::uint16_t bits) {
    ModeSet s;
    s.bits_ = bits & kMask;
    return s;
  }

  constexpr void insert(ActionMode m) { bits_ |= bit(m); }
  constexpr void erase(ActionMode m) { bits_ &= static_cast<std::uint16_t>(~bit(m)); }
  constexpr bool contains(ActionMode m) const { return (bits_ & bit(m)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint16_t bits() const { return bits_; }
  constexpr std::size_t size() const {
    std::size_t n = 0;
    for (auto b = bits_; b; b &= static_cast<std::uint16_t>(b - 1)) ++n;
    return n;
  }
  constexpr bool only_atomic() const { return (bits_ & ~kAtomicMask) == 0; }

  std::vector<ActionMode> to_vector() const {
    std::vector<ActionMode> out;
    for (auto m : kAllModes) {
      if (contains(m)) out.push_back(m);
    }
    return out;
  }

  friend constexpr bool operator==(ModeSet a, ModeSet b) { return a.bits_ == b.bits_; }
  friend constexpr ModeSet operator|(ModeSet a, ModeSet b) {
    return from_bits(static_cast<std::uint16_t>(a.bits_ | b.bits_));
  }

 private:
  static constexpr std::uint16_t kMask = (1u << kModeCount) - 1;
  static constexpr std::uint16_t kAtomicMask = (1u << kAtomicModeCount) - 1;
  static constexpr std::uint16_t bit(ActionMode m) {
    return static_cast<std::uint16_t>(1u << index_of(m));
  }
  std::uint16_t bits_ = 0;
};

/// Maps a set of atomic modes onto the collapsed modes it implies:
/// Collective = CP|CF, Singular = SP|SF, Force = SF|CF, Peace = SP|CP,
/// All = any atomic mode. Throws on collapsed input.
inline ModeSet collapse_labels(ModeSet atomic) {
  if (!atomic.only_atomic()) {
    throw Error("collapsed-label", "collapse_labels accepts atomic modes only");
  }
  const bool sp = atomic.contains(ActionMode::SingularPeace);
  const bool sf = atomic.contains(ActionMode::SingularForce);
  const bool cp = atomic.contains(ActionMode::CollectivePeace);
  const bool cf = atomic.contains(ActionMode::CollectiveForce);
  ModeSet out;
  if (cp || cf) out.insert(ActionMode::Collective);
  if (sp || sf) out.insert(ActionMode::Singular);
  if (sf || cf) out.insert(ActionMode::Force);
  if (sp || cp) out.insert(ActionMode::Peace);
  if (!atomic.empty()) out.insert(ActionMode::All);
  return out;
}

/// Binary label of a coded document for one classifier: atomic modes read
/// the coding directly, collapsed modes read its projection.
inline bool label_for(ModeSet atomic, ActionMode mode) {
  return is_atomic(mode) ? atomic.contains(mode) : collapse_labels(atomic).contains(mode);
}

}  // namespace socact

#endif  // SOCACT_MODES_HPP
