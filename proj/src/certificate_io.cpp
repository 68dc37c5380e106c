#include "davlab/construction.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "davlab/digest.hpp"

namespace davlab {

using nlohmann::json;

/* ------------------------------------------------------------------------ */
/* Serialization                                                             */
/* ------------------------------------------------------------------------ */

namespace {

json cover_to_json(const StageCover& cover) {
    json j;
    j["dim"] = cover.dim;
    j["mode"] = cover.mode;
    j["ys"] = cover.ys;
    j["xs"] = cover.xs;
    j["redraws"] = cover.redraws;
    j["bad_size_known"] = cover.bad_size_known;
    j["bad_size"] = cover.bad_size;
    j["normal_known"] = cover.normal_known;
    j["normal_count"] = cover.normal_count;
    return j;
}

json cert_to_json_object(const Certificate& cert) {
    json j;
    j["schema"] = kCertificateSchema;
    j["p"] = cert.p;
    j["k_total"] = cert.k_total;
    j["scale"] = cert.scale.str();
    j["interval_radius"] = cert.interval_radius;
    j["seed"] = cert.seed;
    j["test_mode"] = cert.test_mode;
    j["stages"] = json::array();
    for (const auto& st : cert.stages) j["stages"].push_back(cover_to_json(st));
    j["weights"] = cert.weights;
    j["wrapped"] = cert.wrapped;
    j["accounting_bound"] = cert.accounting_bound;
    j["bounds"] = json::array();
    for (const auto& b : cert.bounds)
        j["bounds"].push_back({{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs},
                               {"holds", b.holds}});
    j["verification"] = {{"tier", tier_name(cert.verification.tier)},
                         {"pass", cert.verification.pass},
                         {"checked", cert.verification.checked},
                         {"total", cert.verification.total},
                         {"detail", cert.verification.detail},
                         {"failure_witness", cert.verification.failure_witness},
                         {"min_core_sizes", cert.verification.min_core_sizes}};
    j["digest"] = cert.digest;
    return j;
}

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw std::runtime_error(std::string("certificate: missing field \"") + key + "\"");
    return j.at(key);
}

std::uint64_t need_u64(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw std::runtime_error(std::string("certificate: field \"") + key +
                                 "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool need_bool(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_boolean())
        throw std::runtime_error(std::string("certificate: field \"") + key +
                                 "\" must be a boolean");
    return v.get<bool>();
}

std::string need_str(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_string())
        throw std::runtime_error(std::string("certificate: field \"") + key +
                                 "\" must be a string");
    return v.get<std::string>();
}

std::vector<std::uint32_t> u32_list(const json& v, const char* key) {
    if (!v.is_array())
        throw std::runtime_error(std::string("certificate: field \"") + key +
                                 "\" must be an array");
    std::vector<std::uint32_t> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0))
            throw std::runtime_error(std::string("certificate: field \"") + key +
                                     "\" must contain nonnegative integers");
        out.push_back(e.get<std::uint32_t>());
    }
    return out;
}

StageCover cover_from_json(const json& j) {
    StageCover cover;
    cover.dim = static_cast<std::uint32_t>(need_u64(j, "dim"));
    cover.mode = need_str(j, "mode");
    for (const auto& t : need(j, "ys")) cover.ys.push_back(u32_list(t, "ys"));
    for (const auto& t : need(j, "xs")) cover.xs.push_back(u32_list(t, "xs"));
    if (!need(j, "ys").is_array() || !need(j, "xs").is_array())
        throw std::runtime_error("certificate: ys/xs must be arrays");
    cover.redraws = need_u64(j, "redraws");
    cover.bad_size_known = need_bool(j, "bad_size_known");
    cover.bad_size = need_u64(j, "bad_size");
    cover.normal_known = need_bool(j, "normal_known");
    cover.normal_count = need_u64(j, "normal_count");
    return cover;
}

Certificate cert_from_json_object(const json& j) {
    const std::string schema = need_str(j, "schema");
    if (schema != kCertificateSchema)
        throw ParamError("unsupported certificate schema \"" + schema + "\" (expected \"" +
                         kCertificateSchema + "\")");
    Certificate cert;
    cert.p = static_cast<std::uint32_t>(need_u64(j, "p"));
    cert.k_total = static_cast<std::uint32_t>(need_u64(j, "k_total"));
    cert.scale = Rational::parse(need_str(j, "scale"));
    cert.interval_radius = static_cast<std::uint32_t>(need_u64(j, "interval_radius"));
    cert.seed = need_u64(j, "seed");
    cert.test_mode = need_bool(j, "test_mode");
    for (const auto& st : need(j, "stages")) cert.stages.push_back(cover_from_json(st));
    cert.weights = u32_list(need(j, "weights"), "weights");
    cert.wrapped = need_bool(j, "wrapped");
    cert.accounting_bound = need_u64(j, "accounting_bound");
    for (const auto& b : need(j, "bounds"))
        cert.bounds.push_back(BoundCheck{need_str(b, "name"), need_str(b, "lhs"),
                                         need_str(b, "rhs"), need_bool(b, "holds")});
    const json& v = need(j, "verification");
    const auto tier = tier_from_name(need_str(v, "tier"));
    if (!tier) throw std::runtime_error("certificate: unknown verification tier");
    cert.verification.tier = *tier;
    cert.verification.pass = need_bool(v, "pass");
    cert.verification.checked = need_u64(v, "checked");
    cert.verification.total = need_u64(v, "total");
    cert.verification.detail = need_str(v, "detail");
    cert.verification.failure_witness = u32_list(need(v, "failure_witness"), "failure_witness");
    for (const auto& e : need(v, "min_core_sizes")) {
        if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0))
            throw std::runtime_error("certificate: min_core_sizes must contain integers");
        cert.verification.min_core_sizes.push_back(e.get<std::uint64_t>());
    }
    cert.digest = need_str(j, "digest");
    return cert;
}

} // namespace

std::string certificate_to_json(const Certificate& cert) {
    return cert_to_json_object(cert).dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("certificate: malformed JSON: ") + e.what());
    }
    return cert_from_json_object(j);
}

std::string certificate_digest(const Certificate& cert) {
    json j = cert_to_json_object(cert);
    j.erase("digest");
    return format_digest(fnv1a64(j.dump()));
}

void save_certificate(const Certificate& cert, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << certificate_to_json(cert);
    if (!out) throw std::runtime_error("failed to write " + path);
}

Certificate load_certificate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return certificate_from_json(buf.str());
}

} // namespace davlab
