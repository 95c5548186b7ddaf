#pragma once

#include <array>
#include <stdexcept>
#include <string_view>

namespace wzm {

// The four optical modes of the two-downconverter setup: signal/idler of
// crystal 1, signal/idler of crystal 2. The numeric values are the storage
// indices and are stable for the whole run.
enum class ModeId : int { s1 = 0, i1 = 1, s2 = 2, i2 = 3 };

inline constexpr int kModeCount = 4;

constexpr std::string_view mode_label(ModeId m) {
  switch (m) {
    case ModeId::s1: return "s1";
    case ModeId::i1: return "i1";
    case ModeId::s2: return "s2";
    case ModeId::i2: return "i2";
  }
  return "?";
}

// Fixed labeling and ordering [s1, i1, s2, i2].
struct ModeLayout {
  static constexpr std::array<ModeId, kModeCount> order{ModeId::s1, ModeId::i1,
                                                        ModeId::s2, ModeId::i2};

  static constexpr int size() { return kModeCount; }

  static constexpr int index(ModeId m) { return static_cast<int>(m); }

  static constexpr ModeId at(int i) {
    if (i < 0 || i >= kModeCount)
      throw std::out_of_range("ModeLayout::at: index outside 0..3");
    return order[static_cast<std::size_t>(i)];
  }
};

}  // namespace wzm
