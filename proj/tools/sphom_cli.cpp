// sphom: command-line front end.
//
// Exit status: 0 success, 1 parse or usage error, 2 degenerate input,
// 3 bootstrap failure, 4 any other failure (including a failed verify).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <sphom/sphom.hpp>

namespace {

enum exit_code { ok = 0, usage = 1, degenerate = 2, bootstrap_failed = 3, other = 4 };

int exit_for(sphom::errc e)
{
    switch (e) {
    case sphom::errc::parse_error: return usage;
    case sphom::errc::degenerate_system: return degenerate;
    case sphom::errc::refinement_failure:
    case sphom::errc::degenerate_kernel:
    case sphom::errc::genericity_exhausted: return bootstrap_failed;
    default: return other;
    }
}

void emit(const sphom::json& j, const std::string& output)
{
    if (output.empty() || output == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(output);
    if (!out)
        throw sphom::error(sphom::errc::parse_error, "cannot write " + output);
    out << j.dump(2) << '\n';
}

// Points given as rows of exponents, or the union support of a system.
sphom::IntMatrix support_from(const sphom::json& j)
{
    if (j.is_object() && j.contains("points")) {
        return sphom::matrix_from_json(j["points"]).transpose();
    }
    const auto F = sphom::system_from_json(j);
    return sphom::padded_unmixed(F).A();
}

struct Settings {
    std::string input;
    std::string report;
    std::string output;
    std::uint64_t seed = 0;
    std::string schedule = "serial";
    std::optional<std::size_t> dmax;
    unsigned workers = 1;
    double tolerance = 1e-12;
    sphom::FilterConfig filter;
    sphom::TrackerConfig tracker;
};

sphom::json run_solve(const Settings& s)
{
    sphom::RunOptions opt;
    opt.seed = s.seed;
    opt.filter = s.filter;
    opt.tracker = s.tracker;
    opt.workers = s.workers;
    opt.schedule = s.schedule == "combined" ? sphom::ScheduleKind::combined : sphom::ScheduleKind::serial;
    opt.d_max = s.dmax;
    auto res = sphom::run_stratified(sphom::load_system(s.input), opt);
    return sphom::report_json(res);
}

sphom::json run_volume(const Settings& s)
{
    const auto S = support_from(sphom::parse_json(sphom::read_file(s.input)));
    auto gt = sphom::generic_triangulation(S, sphom::Rng(s.seed));
    return sphom::triangulation_json(gt.triangulation);
}

sphom::json run_snf(const Settings& s)
{
    const auto j = sphom::parse_json(sphom::read_file(s.input));
    const sphom::IntMatrix A = j.is_object() && j.contains("matrix") ? sphom::matrix_from_json(j["matrix"])
                                                                     : support_from(j);
    return sphom::smith_json(sphom::smith_normal_form(A));
}

sphom::json run_bootstrap(const Settings& s)
{
    const sphom::Rng rng(s.seed);
    auto prep = sphom::prepare(sphom::load_system(s.input), rng);
    auto starts = sphom::bootstrap(prep.setup.homotopy, prep.setup.triangulation);
    return sphom::bootstrap_json(prep.setup, starts);
}

// Re-evaluates every stored sample against the system; true when all
// residuals agree with the stored ones to the tolerance.
bool run_verify(const Settings& s, sphom::json& summary)
{
    const auto F = sphom::padded_unmixed(sphom::load_system(s.input));
    const auto report = sphom::parse_json(sphom::read_file(s.report));
    if (!report.contains("sample_sets") || !report["sample_sets"].is_object())
        throw sphom::error(sphom::errc::parse_error, "report has no sample_sets");
    std::size_t checked = 0, mismatched = 0;
    double worst = 0.0;
    for (const auto& [d, pts] : report["sample_sets"].items()) {
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto x = sphom::point_from_json(pts[k]["x"], "sample_sets." + d + "[" + std::to_string(k) + "].x");
            const double stored = pts[k]["residual"].get<double>();
            const double now = sphom::relative_residual(F, x);
            const double diff = std::abs(now - stored);
            worst = std::max(worst, diff);
            ++checked;
            mismatched += diff > s.tolerance;
        }
    }
    summary = {{"checked", checked}, {"mismatched", mismatched}, {"max_difference", worst},
               {"tolerance", s.tolerance}};
    return mismatched == 0;
}

void add_run_flags(CLI::App* cmd, Settings& s)
{
    cmd->add_option("--seed", s.seed, "seed for every generic choice (default 0)");
    cmd->add_option("--output,-o", s.output, "write the JSON result here instead of standard output");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stratified polyhedral homotopy sampler for Laurent systems"};
    app.require_subcommand(1);
    Settings s;

    auto* solve = app.add_subcommand("solve", "sample every reduced component of a system");
    solve->add_option("input", s.input, "system file (JSON)")->required()->check(CLI::ExistingFile);
    add_run_flags(solve, s);
    solve->add_option("--schedule", s.schedule, "serial | combined")
        ->check(CLI::IsMember({"serial", "combined"}));
    solve->add_option("--dmax", s.dmax, "highest dimension of interest (combined schedule)");
    solve->add_option("--residual-eps", s.filter.residual_eps, "row-wise backward error threshold");
    solve->add_option("--rank-tau", s.filter.rank_tau, "singular value ratio threshold");
    solve->add_option("--merge-tol", s.filter.merge_tol, "distance below which checkpoints merge");
    solve->add_option("--t-endpoint", s.tracker.endpoint_t, "parameter where tracking hands over to Newton");
    solve->add_option("--workers", s.workers, "tracking threads")->check(CLI::PositiveNumber);
    solve->add_flag("--complex-detour", s.tracker.complex_detour, "bend slicing parameters off the real line");

    auto* volume = app.add_subcommand("volume", "normalized volume and cells of a support");
    volume->add_option("input", s.input, "system file or {\"points\": [[...], ...]}")
        ->required()
        ->check(CLI::ExistingFile);
    add_run_flags(volume, s);

    auto* snf = app.add_subcommand("snf", "Smith normal form of a matrix or a support");
    snf->add_option("input", s.input, "{\"matrix\": [[...], ...]} or system file")
        ->required()
        ->check(CLI::ExistingFile);
    snf->add_option("--output,-o", s.output, "write the JSON result here instead of standard output");

    auto* boot = app.add_subcommand("bootstrap", "start points of the homotopy");
    boot->add_option("input", s.input, "system file (JSON)")->required()->check(CLI::ExistingFile);
    add_run_flags(boot, s);

    auto* verify = app.add_subcommand("verify", "re-evaluate the samples of a report against a system");
    verify->add_option("input", s.input, "system file (JSON)")->required()->check(CLI::ExistingFile);
    verify->add_option("report", s.report, "report written by solve")->required()->check(CLI::ExistingFile);
    verify->add_option("--tolerance", s.tolerance, "allowed residual difference (default 1e-12)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*solve) {
            emit(run_solve(s), s.output);
        } else if (*volume) {
            emit(run_volume(s), s.output);
        } else if (*snf) {
            emit(run_snf(s), s.output);
        } else if (*boot) {
            emit(run_bootstrap(s), s.output);
        } else if (*verify) {
            sphom::json summary;
            const bool good = run_verify(s, summary);
            std::cout << summary.dump(2) << '\n';
            if (!good) {
                std::cerr << "verify: stored residuals not reproduced\n";
                return other;
            }
        }
    } catch (const sphom::error& e) {
        std::cerr << e.what() << '\n';
        return exit_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return other;
    }
    return ok;
}
