#pragma once

// One-object-per-line JSON emitters.  Doubles are written in the shortest
// form that round-trips exactly (std::to_chars), so identical runs produce
// byte-identical files.  Key order is fixed and documented in the README;
// the record order below is the contract.

#include <charconv>
#include <cstdint>
#include <string>

#include "axmhd/diagnostics.hpp"

namespace axmhd {

namespace detail {

inline void json_number(std::string& out, double v) {
    if (!std::isfinite(v)) throw Error("ndjson: non-finite value");
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline void json_key(std::string& out, const char* key, bool& first) {
    if (!first) out += ',';
    first = false;
    out += '"';
    out += key;
    out += "\":";
}

inline void json_field(std::string& out, const char* key, double v, bool& first) {
    json_key(out, key, first);
    json_number(out, v);
}

inline void json_field(std::string& out, const char* key, std::int64_t v, bool& first) {
    json_key(out, key, first);
    out += std::to_string(v);
}

inline void json_field(std::string& out, const char* key, bool v, bool& first) {
    json_key(out, key, first);
    out += v ? "true" : "false";
}

inline void json_field(std::string& out, const char* key, const std::string& v,
                       bool& first) {
    json_key(out, key, first);
    out += '"';
    for (char c : v) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

}  // namespace detail

inline std::string to_json_line(const DiagnosticRecord& r) {
    std::string out = "{";
    bool first = true;
    auto f = [&](const char* k, double v) { detail::json_field(out, k, v, first); };
    f("t", r.t);
    f("dt", r.dt);
    detail::json_field(out, "step", r.step, first);
    f("Pi_min", r.Pi_min);
    f("Pi_max", r.Pi_max);
    f("u_L2", r.u_L2);
    f("u_Linf", r.u_Linf);
    f("grad_u_L2", r.grad_u_L2);
    f("grad_u_Linf", r.grad_u_Linf);
    f("B_L2", r.B_L2);
    f("Pi_L2", r.Pi_L2);
    f("Pi_L4", r.Pi_L4);
    f("Pi_L6", r.Pi_L6);
    f("Pi_Linf", r.Pi_Linf);
    f("Omega_L2", r.Omega_L2);
    f("grad_Omega_L2", r.grad_Omega_L2);
    f("axis_term", r.axis_term);
    f("Btheta_L2", r.Btheta_L2);
    f("Btheta_L6", r.Btheta_L6);
    f("Btheta_Linf", r.Btheta_Linf);
    f("omega_L2", r.omega_L2);
    f("grad_omega_L2", r.grad_omega_L2);
    f("omega_over_r_L2", r.omega_over_r_L2);
    f("ur_over_r_Linf", r.ur_over_r_Linf);
    f("grad_B_L2", r.grad_B_L2);
    f("grad_B_L6", r.grad_B_L6);
    f("grad_Pi_L2", r.grad_Pi_L2);
    f("grad2_B_L2", r.grad2_B_L2);
    f("besov_u", r.besov_u);
    f("grad_u_H32", r.grad_u_H32);
    f("int_grad_u_Linf", r.int_grad_u_Linf);
    f("int_ur_over_r_Linf", r.int_ur_over_r_Linf);
    f("int_grad_Omega2", r.int_grad_Omega2);
    f("int_grad_u2", r.int_grad_u2);
    out += '}';
    return out;
}

inline std::string to_json_line(const InequalityReport& r) {
    std::string out = "{";
    bool first = true;
    detail::json_field(out, "kind", std::string("inequality"), first);
    detail::json_field(out, "name", r.name, first);
    detail::json_field(out, "lhs", r.lhs, first);
    detail::json_field(out, "rhs", r.rhs, first);
    detail::json_field(out, "slack", r.slack, first);
    detail::json_field(out, "tolerance", r.tolerance, first);
    detail::json_field(out, "satisfied", r.satisfied, first);
    out += '}';
    return out;
}

inline std::string to_json_line(const RatioReport& r) {
    std::string out = "{";
    bool first = true;
    detail::json_field(out, "kind", std::string("ratio"), first);
    detail::json_field(out, "name", r.name, first);
    detail::json_field(out, "value", r.omitted ? 0.0 : r.value, first);
    detail::json_field(out, "omitted", r.omitted, first);
    out += '}';
    return out;
}

inline std::string to_json_line(const EnvelopeReport& r) {
    std::string out = "{";
    bool first = true;
    detail::json_field(out, "kind", std::string("envelope"), first);
    detail::json_field(out, "name", r.name, first);
    detail::json_field(out, "c1", r.c1, first);
    detail::json_field(out, "c2", r.c2, first);
    detail::json_field(out, "covered", r.covered, first);
    detail::json_field(out, "samples", std::int64_t(r.samples), first);
    out += '}';
    return out;
}

inline std::string to_json_line(const BesovLipReport& r) {
    std::string out = "{";
    bool first = true;
    detail::json_field(out, "kind", std::string("besov_lip"), first);
    detail::json_field(out, "besov_time_integral", r.besov_time_integral, first);
    detail::json_field(out, "grad_u_Linf_time_integral", r.grad_u_Linf_time_integral,
                       first);
    detail::json_field(out, "max_ratio", r.max_ratio, first);
    detail::json_field(out, "omitted", r.omitted, first);
    out += '}';
    return out;
}

inline std::string to_json_line(const MagneticIdentityReport& r) {
    std::string out = "{";
    bool first = true;
    detail::json_field(out, "kind", std::string("magnetic_identity"), first);
    detail::json_field(out, "rel_l2", std::isfinite(r.rel_l2) ? r.rel_l2 : -1.0, first);
    detail::json_field(out, "lhs_l2", r.lhs_l2, first);
    detail::json_field(out, "rhs_l2", r.rhs_l2, first);
    out += '}';
    return out;
}

}  // namespace axmhd
