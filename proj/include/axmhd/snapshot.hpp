#pragma once

// Binary field container, little-endian throughout:
//   magic "AXMHD1" | u32 version=1 | u32 nr | u32 nz | f64 r_max | f64 z_len
//   | f64 t | u32 field_count
//   field_count x ( u32 name_len | name bytes | u8 parity | nr*nz f64, r fastest )
//   | u32 config_len | config bytes
//   | u32 meta_count x ( u32 name_len | name bytes | f64 value )
// The config echo and the named meta section carry everything a restart
// needs (step counter, integral accumulators, run extrema); readers that
// only want fields can stop after the field records.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "axmhd/grid.hpp"

namespace axmhd {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts are unsupported");

struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

struct SnapshotField {
    std::string name;
    Parity parity = Parity::Even;
    std::vector<double> data;  // nr*nz, r fastest
};

struct Snapshot {
    std::uint32_t version = 1;
    std::uint32_t nr = 0, nz = 0;
    double r_max = 0, z_len = 0, t = 0;
    std::vector<SnapshotField> fields;
    std::string config_echo;
    std::vector<std::pair<std::string, double>> meta;

    double meta_value(const std::string& name) const {
        for (const auto& [k, v] : meta)
            if (k == name) return v;
        throw FormatError("snapshot: missing meta entry '" + name + "'");
    }
    bool has_meta(const std::string& name) const {
        for (const auto& [k, v] : meta)
            if (k == name) return true;
        return false;
    }
    const SnapshotField& field(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return f;
        throw FormatError("snapshot: missing field '" + name + "'");
    }
};

namespace detail {

constexpr char kSnapshotMagic[6] = {'A', 'X', 'M', 'H', 'D', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw FormatError("snapshot: truncated file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, std::uint32_t(s.size()));
    out.write(s.data(), std::streamsize(s.size()));
}

inline std::string get_string(std::istream& in, std::uint32_t limit = 1u << 28) {
    std::uint32_t n = get<std::uint32_t>(in);
    if (n > limit) throw FormatError("snapshot: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), std::streamsize(n));
    if (!in) throw FormatError("snapshot: truncated string");
    return s;
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("snapshot: cannot open '" + path + "' for writing");
    out.write(detail::kSnapshotMagic, sizeof(detail::kSnapshotMagic));
    detail::put<std::uint32_t>(out, s.version);
    detail::put<std::uint32_t>(out, s.nr);
    detail::put<std::uint32_t>(out, s.nz);
    detail::put<double>(out, s.r_max);
    detail::put<double>(out, s.z_len);
    detail::put<double>(out, s.t);
    detail::put<std::uint32_t>(out, std::uint32_t(s.fields.size()));
    for (const auto& f : s.fields) {
        if (f.data.size() != std::size_t(s.nr) * s.nz)
            throw IoError("snapshot: field '" + f.name + "' has wrong size");
        detail::put_string(out, f.name);
        detail::put<std::uint8_t>(out, f.parity == Parity::Odd ? 1 : 0);
        out.write(reinterpret_cast<const char*>(f.data.data()),
                  std::streamsize(f.data.size() * sizeof(double)));
    }
    detail::put_string(out, s.config_echo);
    detail::put<std::uint32_t>(out, std::uint32_t(s.meta.size()));
    for (const auto& [k, v] : s.meta) {
        detail::put_string(out, k);
        detail::put<double>(out, v);
    }
    out.flush();
    if (!out) throw IoError("snapshot: write to '" + path + "' failed");
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("snapshot: cannot open '" + path + "'");
    char magic[sizeof(detail::kSnapshotMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kSnapshotMagic, sizeof(magic)) != 0)
        throw FormatError("snapshot: bad magic in '" + path + "'");
    Snapshot s;
    s.version = detail::get<std::uint32_t>(in);
    if (s.version != 1)
        throw FormatError("snapshot: unsupported version " + std::to_string(s.version));
    s.nr = detail::get<std::uint32_t>(in);
    s.nz = detail::get<std::uint32_t>(in);
    s.r_max = detail::get<double>(in);
    s.z_len = detail::get<double>(in);
    s.t = detail::get<double>(in);
    std::uint32_t nfields = detail::get<std::uint32_t>(in);
    if (std::uint64_t(s.nr) * s.nz > (1ull << 32))
        throw FormatError("snapshot: implausible grid size");
    for (std::uint32_t i = 0; i < nfields; ++i) {
        SnapshotField f;
        f.name = detail::get_string(in);
        f.parity = detail::get<std::uint8_t>(in) ? Parity::Odd : Parity::Even;
        f.data.resize(std::size_t(s.nr) * s.nz);
        in.read(reinterpret_cast<char*>(f.data.data()),
                std::streamsize(f.data.size() * sizeof(double)));
        if (!in) throw FormatError("snapshot: truncated field '" + f.name + "'");
        s.fields.push_back(std::move(f));
    }
    s.config_echo = detail::get_string(in);
    std::uint32_t nmeta = detail::get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nmeta; ++i) {
        std::string k = detail::get_string(in);
        double v = detail::get<double>(in);
        s.meta.emplace_back(std::move(k), v);
    }
    return s;
}

// field payload <-> live ScalarField
inline SnapshotField pack_field(const std::string& name, const ScalarField& f) {
    return SnapshotField{name, f.parity, f.v};
}

inline ScalarField unpack_field(const Snapshot& s, const std::string& name,
                                const CylGrid& g) {
    const SnapshotField& f = s.field(name);
    if (s.nr != std::uint32_t(g.nr) || s.nz != std::uint32_t(g.nz))
        throw FormatError("snapshot: grid shape mismatch for '" + name + "'");
    ScalarField out(g, f.parity);
    out.v = f.data;
    return out;
}

}  // namespace axmhd
