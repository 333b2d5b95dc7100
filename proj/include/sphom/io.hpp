#pragma once

// JSON input and output. A system file looks like
//
//   {"vars": ["x1", "x2"],
//    "polys": [[{"exp": [2, 0], "re": 1.0, "im": 0.0}, ...], ...]}
//
// where "im" may be omitted. Reports are plain JSON objects; everything but
// the "timestamp" member is a deterministic function of input and options.

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bootstrap.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "lattice.hpp"
#include "laurent.hpp"
#include "polyhedral.hpp"

namespace sphom {

using json = nlohmann::json;

/// Parses text as JSON; syntax errors carry the line and column.
inline json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw error(errc::parse_error, e.what());
    }
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error(errc::parse_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

[[noreturn]] inline void schema(const std::string& where, const std::string& what)
{
    throw error(errc::parse_error, where + ": " + what);
}

inline long long json_integer(const json& v, const std::string& where)
{
    if (!v.is_number_integer())
        schema(where, "expected an integer");
    return v.get<long long>();
}

inline double json_real(const json& v, const std::string& where)
{
    if (!v.is_number())
        schema(where, "expected a number");
    return v.get<double>();
}

} // namespace detail

inline LaurentSystem system_from_json(const json& j)
{
    if (!j.is_object())
        detail::schema("$", "expected an object with \"polys\"");
    if (!j.contains("polys") || !j["polys"].is_array())
        detail::schema("$.polys", "expected an array of polynomials");
    LaurentSystem F;
    const auto& polys = j["polys"];
    std::size_t n = 0;
    bool have_n = false;
    if (j.contains("vars")) {
        if (!j["vars"].is_array())
            detail::schema("$.vars", "expected an array of names");
        for (const auto& v : j["vars"]) {
            if (!v.is_string())
                detail::schema("$.vars", "variable names must be strings");
            F.var_names.push_back(v.get<std::string>());
        }
        n = F.var_names.size();
        have_n = true;
    }
    for (std::size_t i = 0; i < polys.size(); ++i) {
        const std::string pw = "$.polys[" + std::to_string(i) + "]";
        if (!polys[i].is_array())
            detail::schema(pw, "expected an array of terms");
        LaurentPolynomial p;
        for (std::size_t k = 0; k < polys[i].size(); ++k) {
            const std::string tw = pw + "[" + std::to_string(k) + "]";
            const auto& t = polys[i][k];
            if (!t.is_object() || !t.contains("exp") || !t["exp"].is_array())
                detail::schema(tw, "expected {\"exp\": [...], \"re\": ..., \"im\": ...}");
            Exponent e;
            for (const auto& v : t["exp"])
                e.push_back(detail::json_integer(v, tw + ".exp"));
            if (!have_n) {
                n = e.size();
                have_n = true;
            }
            if (e.size() != n)
                detail::schema(tw + ".exp", "expected " + std::to_string(n) + " exponents");
            if (!t.contains("re"))
                detail::schema(tw, "missing \"re\"");
            const double re = detail::json_real(t["re"], tw + ".re");
            const double im = t.contains("im") ? detail::json_real(t["im"], tw + ".im") : 0.0;
            p.support.push_back(std::move(e));
            p.coeffs.emplace_back(re, im);
        }
        F.polys.push_back(std::move(p));
    }
    F.num_vars = n;
    if (F.var_names.empty())
        for (std::size_t i = 0; i < n; ++i)
            F.var_names.push_back("x" + std::to_string(i + 1));
    try {
        validate(F);
    } catch (const error& e) {
        throw error(errc::parse_error, e.what());
    }
    return F;
}

inline LaurentSystem parse_system(const std::string& text) { return system_from_json(parse_json(text)); }

inline LaurentSystem load_system(const std::string& path) { return parse_system(read_file(path)); }

inline json system_to_json(const LaurentSystem& F)
{
    json polys = json::array();
    for (const auto& p : F.polys) {
        json terms = json::array();
        for (std::size_t k = 0; k < p.support.size(); ++k)
            terms.push_back({{"exp", p.support[k]}, {"re", p.coeffs[k].real()}, {"im", p.coeffs[k].imag()}});
        polys.push_back(std::move(terms));
    }
    return {{"vars", F.var_names}, {"polys", std::move(polys)}};
}

inline IntMatrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty())
        detail::schema("$.matrix", "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    IntMatrix A(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = "$.matrix[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != cols)
            detail::schema(w, "rows must be arrays of equal length");
        for (std::size_t k = 0; k < cols; ++k)
            A(i, k) = detail::json_integer(j[i][k], w);
    }
    return A;
}

/// Integers as JSON numbers when they fit, decimal strings otherwise.
inline json integer_json(const Integer& v)
{
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
        return static_cast<long long>(v);
    return v.str();
}

inline json matrix_json(const IntMatrix& A)
{
    json rows = json::array();
    for (std::size_t i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < A.cols(); ++k)
            row.push_back(integer_json(A(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json rational_json(const Rational& r) { return r.str(); }

inline json point_json(const cvec& x)
{
    json out = json::array();
    for (Eigen::Index j = 0; j < x.size(); ++j)
        out.push_back({x[j].real(), x[j].imag()});
    return out;
}

inline cvec point_from_json(const json& j, const std::string& where)
{
    if (!j.is_array())
        detail::schema(where, "expected [[re, im], ...]");
    cvec x(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_array() || j[k].size() != 2)
            detail::schema(where, "expected [re, im] pairs");
        x[static_cast<Eigen::Index>(k)] = {detail::json_real(j[k][0], where), detail::json_real(j[k][1], where)};
    }
    return x;
}

inline json smith_json(const SmithDecomposition& s)
{
    json f = json::array();
    for (const auto& d : s.invariant_factors)
        f.push_back(integer_json(d));
    return {{"P", matrix_json(s.P)},
            {"Q", matrix_json(s.Q)},
            {"D", matrix_json(s.diagonal())},
            {"invariant_factors", std::move(f)},
            {"rank", s.rank}};
}

inline json triangulation_json(const RegularTriangulation& T)
{
    json cells = json::array();
    for (const auto& f : T.facets) {
        json normal = json::array();
        for (const auto& a : f.normal)
            normal.push_back(rational_json(a));
        cells.push_back({{"cell", f.cell}, {"volume", integer_json(f.volume)}, {"normal", std::move(normal)},
                         {"level", rational_json(f.level)}});
    }
    return {{"normalized_volume", integer_json(T.normalized_volume)}, {"cells", std::move(cells)}};
}

inline json bootstrap_json(const HomotopySetup& setup, const Bootstrap& b)
{
    const auto& H = setup.homotopy;
    json pts = json::array();
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const auto& p = b.points[i];
        pts.push_back({{"id", i},
                       {"cell", p.cell},
                       {"y", point_json(p.y)},
                       {"x", point_json(to_plain(b.frames[p.cell], p.y, H.M))},
                       {"residual", p.residual}});
    }
    json lift = json::array();
    for (const auto& w : H.lifting.values)
        lift.push_back(rational_json(w));
    return {{"normalized_volume", integer_json(setup.triangulation.normalized_volume)},
            {"M", H.M},
            {"gap", setup.gap},
            {"lifting", std::move(lift)},
            {"triangulation", triangulation_json(setup.triangulation)},
            {"start_points", std::move(pts)}};
}

inline json sample_json(const SamplePoint& s)
{
    return {{"x", point_json(s.x)},
            {"normalized_x", point_json(s.normalized)},
            {"residual", s.residual_F},
            {"residual_sliced", s.residual_sliced},
            {"nullity", s.nullity_estimate},
            {"condition", s.condition},
            {"path_id", s.path_id},
            {"segment", s.segment}};
}

inline std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// The run report. "timestamp" holds the wall clock and phase timings and is
/// the only member that differs between identical runs.
inline json report_json(const StratifiedResult& r)
{
    const RunMetadata& m = r.metadata;
    json sets = json::object();
    for (auto it = r.sample_sets.rbegin(); it != r.sample_sets.rend(); ++it) {
        json pts = json::array();
        for (const auto& s : it->second)
            pts.push_back(sample_json(s));
        sets[std::to_string(it->first)] = std::move(pts);
    }
    json ladder = json::array();
    for (const auto& l : r.ladder)
        ladder.push_back({{"segment", l.segment},
                          {"rank", l.rank},
                          {"raw", l.raw},
                          {"unique", l.unique},
                          {"filtered", l.filtered},
                          {"accepted", l.accepted}});
    json dropped_pts = json::array();
    for (const auto& d : r.dropped)
        dropped_pts.push_back({{"path_id", d.path_id},
                               {"segment", d.segment},
                               {"rank", d.rank},
                               {"reason", d.reason},
                               {"x", point_json(d.x)}});
    json paths = json::array();
    for (const auto& p : r.paths)
        paths.push_back({{"id", p.id},
                         {"cell", p.cell},
                         {"status", to_string(p.status)},
                         {"segments", p.segments_done},
                         {"steps", p.steps},
                         {"rejections", p.rejections},
                         {"final_condition", p.final_condition}});
    json timings = json::object();
    for (const auto& [k, v] : m.timings_ms)
        timings[k] = v;

    return {{"seed", m.seed},
            {"normalized_volume", parse_json(m.normalized_volume)},
            {"schedule", {{"kind", to_string(m.schedule)}, {"d_max", m.d_max}, {"segments", m.segments}}},
            {"sample_sets", std::move(sets)},
            {"ladder", std::move(ladder)},
            {"dropped", {{"counts", r.dropped_counts()}, {"points", std::move(dropped_pts)}}},
            {"paths", std::move(paths)},
            {"system",
             {{"num_vars", m.num_vars},
              {"num_polys", m.num_polys},
              {"normalized_vars", m.normalized_vars},
              {"normalized_terms", m.normalized_terms}}},
            {"coordinate_change",
             {{"steps", m.coordinate_steps},
              {"orbit_dimension", m.orbit_dimension},
              {"cover_degree", m.cover_degree},
              {"randomized_unmix", m.randomized_unmix},
              {"randomized_overdetermined", m.randomized_overdetermined}}},
            {"lifting",
             {{"scheme", "uniform k/2^20"}, {"draws", m.lifting_draws}, {"M", m.M}, {"gap", m.gap}}},
            {"timestamp", {{"utc", utc_now()}, {"timings_ms", std::move(timings)}}}};
}

} // namespace sphom
