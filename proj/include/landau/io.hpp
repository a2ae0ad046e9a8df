#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace landau {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// '#'-prefixed metadata lines, one header row, then data rows
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& p, const std::vector<std::pair<std::string, std::string>>& meta,
              const std::vector<std::string>& columns)
        : out_(p, std::ios::binary) {
        require(out_.good(), ErrorKind::config, "cannot write " + p.string());
        for (const auto& [k, v] : meta) out_ << "# " << k << ": " << v << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    CsvWriter& operator<<(double x) { return cell(fmt17(x)); }
    CsvWriter& operator<<(int x) { return cell(std::to_string(x)); }
    CsvWriter& operator<<(long x) { return cell(std::to_string(x)); }
    CsvWriter& operator<<(std::size_t x) { return cell(std::to_string(x)); }
    CsvWriter& operator<<(const std::string& x) { return cell(x); }
    CsvWriter& operator<<(const char* x) { return cell(x); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& cell(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }
    std::ofstream out_;
    bool first_ = true;
};

// Snapshot layout, little-endian:
//   "LLAB", u32 version, u32 d, u32 Nx, u32 Nv, f64 V, f64 t,
//   then Nx * Nv (re, im) f64 pairs, rows k = -Nx/2..Nx/2-1, columns eta_p, p = -Nv/2..Nv/2-1.
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {
template <class T>
void put_le(std::ostream& o, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    o.write(reinterpret_cast<const char*>(b), sizeof(T));
}
template <class T>
T get_le(std::istream& in) {
    unsigned char b[sizeof(T)];
    in.read(reinterpret_cast<char*>(b), sizeof(T));
    require(in.good(), ErrorKind::config, "truncated snapshot");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
} // namespace detail

inline void write_snapshot(const std::filesystem::path& p, const FieldSpectrum& s) {
    std::ofstream o(p, std::ios::binary);
    require(o.good(), ErrorKind::config, "cannot write " + p.string());
    o.write("LLAB", 4);
    detail::put_le<std::uint32_t>(o, snapshot_version);
    detail::put_le<std::uint32_t>(o, static_cast<std::uint32_t>(s.grid.d));
    detail::put_le<std::uint32_t>(o, static_cast<std::uint32_t>(s.grid.Nx));
    detail::put_le<std::uint32_t>(o, static_cast<std::uint32_t>(s.grid.Nv));
    detail::put_le<double>(o, s.grid.V);
    detail::put_le<double>(o, s.t);
    for (auto z : s.c) {
        detail::put_le<double>(o, z.real());
        detail::put_le<double>(o, z.imag());
    }
}

inline FieldSpectrum read_snapshot(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(in.good(), ErrorKind::config, "cannot read " + p.string());
    char magic[4];
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "LLAB", 4) == 0, ErrorKind::config, p.string() + " is not a snapshot");
    require(detail::get_le<std::uint32_t>(in) == snapshot_version, ErrorKind::config, "unsupported snapshot version");
    PhaseGrid g;
    g.d = static_cast<int>(detail::get_le<std::uint32_t>(in));
    g.Nx = detail::get_le<std::uint32_t>(in);
    g.Nv = detail::get_le<std::uint32_t>(in);
    g.V = detail::get_le<double>(in);
    FieldSpectrum s(g);
    s.t = detail::get_le<double>(in);
    for (auto& z : s.c) {
        const double re = detail::get_le<double>(in);
        z = cplx(re, detail::get_le<double>(in));
    }
    return s;
}

} // namespace landau
