#include "kem/memristor_image.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "kem/errors.hpp"

namespace kem {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MemristorImage generate_image(std::uint64_t seed64) {
    MemristorImage img;
    for (std::size_t a = 0; a < MemristorImage::kAddresses; ++a) {
        for (std::size_t c = 0; c < MemristorImage::kCurrentLevels; ++c) {
            const std::uint64_t u = splitmix64_at(seed64, a * MemristorImage::kCurrentLevels + c);
            const double fraction = static_cast<double>(u >> 11) * 0x1.0p-53;
            img.set_cell(a, c, 100.0 + 900.0 * fraction);
        }
    }
    return img;
}

std::size_t save_image(const MemristorImage& img, std::ostream& sink) {
    std::string text;
    text += "# memristor image: 128 addresses x 8 current levels, ohms\n";
    text += "# row k = address k; columns = current levels 0..7\n";

    char buf[64];
    for (std::size_t a = 0; a < MemristorImage::kAddresses; ++a) {
        for (std::size_t c = 0; c < MemristorImage::kCurrentLevels; ++c) {
            const auto res = std::to_chars(buf, buf + sizeof buf, img.cell(a, c));
            text.append(buf, res.ptr);
            text.push_back(c + 1 < MemristorImage::kCurrentLevels ? ',' : '\n');
        }
    }

    sink.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!sink) {
        throw ImageIoError("failed writing memristor image");
    }
    return text.size();
}

MemristorImage load_image(std::istream& source) {
    MemristorImage img;
    std::size_t row = 0;
    std::string line;

    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (row >= MemristorImage::kAddresses) {
            throw ImageFormatError("more than 128 data rows");
        }

        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t c = 0; c < MemristorImage::kCurrentLevels; ++c) {
            if (c > 0) {
                if (p >= end || *p != ',') {
                    throw ImageFormatError("row " + std::to_string(row) + ": expected 8 comma-separated values");
                }
                ++p;
            }
            double value{};
            const auto res = std::from_chars(p, end, value);
            if (res.ec != std::errc{}) {
                throw ImageFormatError("row " + std::to_string(row) + ": unparsable value");
            }
            if (!std::isfinite(value) || value <= 0.0) {
                throw ImageValueError("row " + std::to_string(row) + ": cell must be finite and positive");
            }
            img.set_cell(row, c, value);
            p = res.ptr;
        }
        if (p != end) {
            throw ImageFormatError("row " + std::to_string(row) + ": trailing characters");
        }
        ++row;
    }

    if (source.bad()) {
        throw ImageIoError("failed reading memristor image");
    }
    if (row != MemristorImage::kAddresses) {
        throw ImageFormatError("expected 128 data rows, got " + std::to_string(row));
    }
    return img;
}

} // namespace kem
