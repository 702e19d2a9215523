#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>

#include "kem/digest_schedule.hpp"

namespace kem {

/// Shared lookup table standing in for the physical memristor: one resistance
/// reading (ohms) per 7-bit address and 3-bit current level. Immutable once
/// built; every cell is finite and strictly positive.
class MemristorImage {
public:
    static constexpr std::size_t kAddresses = 128;
    static constexpr std::size_t kCurrentLevels = 8;

    double cell(std::size_t address, std::size_t current) const {
        return cells_[address * kCurrentLevels + current];
    }

    void set_cell(std::size_t address, std::size_t current, double ohms) {
        cells_[address * kCurrentLevels + current] = ohms;
    }

    friend bool operator==(const MemristorImage&, const MemristorImage&) = default;

private:
    std::array<double, kAddresses * kCurrentLevels> cells_{};
};

/// SplitMix64 output for a (seed, index) pair:
/// the standard finalizer applied to seed + (index+1) * 0x9E3779B97F4A7C15.
/// For a fixed seed, indices 0,1,2,... reproduce the published SplitMix64
/// stream for that seed. Bit-exact across platforms.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

/// Deterministic table: cell(a, c) = 100.0 + 900.0 * f where f is the top
/// 53 bits of splitmix64_at(seed64, 8*a + c) taken as a fraction in [0,1).
MemristorImage generate_image(std::uint64_t seed64);

/// Writes the text format (see README): '#' comments, then 128 rows of 8
/// comma-separated values, shortest round-trippable decimal rendering.
/// Returns bytes written. Throws ImageIoError on stream failure.
std::size_t save_image(const MemristorImage& img, std::ostream& sink);

/// Parses the save_image format. Throws ImageFormatError on wrong shape,
/// ImageValueError on non-finite or non-positive cells, ImageIoError on
/// stream failure.
MemristorImage load_image(std::istream& source);

/// cells[sel.address][sel.current]; the order field does not address the table.
inline double read_cell(const MemristorImage& img, const CellSelector& sel) {
    return img.cell(sel.address, sel.current);
}

} // namespace kem
