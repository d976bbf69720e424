// Command-line driver: derive the knowledge base, solve single problems,
// emit constraint models, run the benchmark harness, re-check saved plans.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tricons/bench.hpp"
#include "tricons/knowledge_base.hpp"
#include "tricons/model_emitter.hpp"
#include "tricons/mzn_check.hpp"
#include "tricons/planner.hpp"
#include "tricons/verifier.hpp"

namespace fs = std::filesystem;
using namespace tricons;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

Catalog load_catalog(const std::string& path) {
    if (path.empty()) return default_catalog();
    return catalog_from_json(nlohmann::json::parse(slurp(path)));
}

KnowledgeBase load_or_derive_kb(const std::string& path, const Catalog& catalog, int probes,
                                double tolerance, uint64_t seed) {
    if (path.empty()) return derive_relations(catalog, probes, tolerance, seed);
    return load_kb(slurp(path), catalog);
}

Problem parse_problem_arg(const std::string& arg, const Catalog& catalog) {
    std::vector<std::string> names;
    std::string cur;
    for (char c : arg) {
        if (c == ',') {
            names.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) names.push_back(cur);
    if (names.size() != 3)
        throw std::runtime_error("--problem expects three comma-separated point names");
    return Problem::from_names(catalog, names[0], names[1], names[2]);
}

std::string problem_slug(const Problem& problem, const Catalog& catalog) {
    std::string s;
    for (ObjectId id : problem.given) {
        if (!s.empty()) s += '_';
        s += catalog.name(id);
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ruler-and-compass triangle construction planner"};
    app.require_subcommand(1);

    std::string catalog_path, kb_path, out_dir = ".", problem_arg, format = "csv";
    std::string problems_path, plan_path, strategy_arg = "minimization";
    int probes = 5, max_steps = 11, window = 3, samples = 5, validate_probes = 100;
    int parallelism = 1;
    double tolerance = 1e-9, verify_tolerance = 1e-7, timeout = 60.0;
    uint64_t seed = 1;
    bool minimize_mode = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--catalog", catalog_path, "catalog JSON file (default: built-in)");
        cmd->add_option("--seed", seed, "random seed");
    };

    auto* derive = app.add_subcommand("derive", "derive the knowledge base by probing");
    add_common(derive);
    derive->add_option("--kb", kb_path, "output knowledge base file")->required();
    derive->add_option("--probes", probes, "number of probe triangles (default 5)");
    derive->add_option("--tolerance", tolerance, "relative tolerance (default 1e-9)");
    derive->add_option("--validate", validate_probes,
                       "fresh probes for validation, 0 to skip (default 100)");

    auto* solve_cmd = app.add_subcommand("solve", "search for a shortest construction plan");
    add_common(solve_cmd);
    solve_cmd->add_option("--problem", problem_arg, "given points, e.g. A,G,O")->required();
    solve_cmd->add_option("--strategy", strategy_arg, "linear|minimization|incremental");
    solve_cmd->add_option("--max-steps", max_steps, "plan length bound (default 11)");
    solve_cmd->add_option("--window", window, "incremental window size (default 3)");
    solve_cmd->add_option("--kb", kb_path, "knowledge base file (default: derive)");
    solve_cmd->add_option("--timeout", timeout, "timeout in seconds (default 60)");
    solve_cmd->add_option("--format", format, "csv|json (default csv-ish text)");
    solve_cmd->add_option("--out", out_dir, "directory for the plan file");

    auto* emit = app.add_subcommand("emit", "emit the constraint model and data files");
    add_common(emit);
    emit->add_option("--problem", problem_arg, "given points, e.g. A,G,O")->required();
    emit->add_option("--kb", kb_path, "knowledge base file (default: derive)");
    emit->add_option("--max-steps", max_steps, "plan length (fixed) or bound (minimize)");
    emit->add_flag("--minimize", minimize_mode, "emit the minimization model");
    emit->add_option("--out", out_dir, "output directory (default .)");

    auto* bench = app.add_subcommand("bench", "run the benchmark harness");
    add_common(bench);
    bench->add_option("--problems", problems_path, "problem list CSV")->required();
    bench->add_option("--kb", kb_path, "knowledge base file (default: derive)");
    bench->add_option("--strategy", strategy_arg,
                      "one strategy or 'all' (default: all three)");
    bench->add_option("--max-steps", max_steps, "plan length bound (default 11)");
    bench->add_option("--window", window, "incremental window size (default 3)");
    bench->add_option("--timeout", timeout, "per-run timeout in seconds (default 60)");
    bench->add_option("--parallelism", parallelism, "worker threads (default 1)");
    bench->add_option("--format", format, "csv|json for stdout summary");
    bench->add_option("--out", out_dir, "report output directory");

    auto* verify = app.add_subcommand("verify", "re-check a saved plan");
    add_common(verify);
    verify->add_option("--plan", plan_path, "plan file")->required();
    verify->add_option("--problem", problem_arg, "given points, e.g. A,G,O")->required();
    verify->add_option("--kb", kb_path, "knowledge base file (default: derive)");
    verify->add_option("--samples", samples, "sample triangles (default 5)");
    verify->add_option("--tolerance", verify_tolerance, "relative tolerance (default 1e-7)");
    verify->add_option("--format", format, "csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        Catalog catalog = load_catalog(catalog_path);

        if (derive->parsed()) {
            KnowledgeBase kb = derive_relations(catalog, probes, tolerance, seed);
            spit(kb_path, save_kb(kb, catalog));
            std::cout << "knowledge base written to " << kb_path << "\n";
            std::cout << "  ratio triplets: " << kb.ratio_triplets.size()
                      << ", quadruplets: " << kb.ratio_quadruplets.size()
                      << ", angle defs: " << kb.angle_defs.size()
                      << ", loci: " << kb.locus_defs.size() << "\n";
            if (validate_probes > 0) {
                auto rep = validate_relations(kb, catalog, validate_probes, tolerance,
                                              seed + 1000002);
                std::cout << "validation over " << validate_probes << " fresh probes: "
                          << rep.failures.size() << " failures\n";
                for (const auto& f : rep.failures)
                    std::cout << "  FAIL " << f.family << " (" << f.tuple << ")\n";
                if (!rep.ok()) return 1;
            }
            return 0;
        }

        if (solve_cmd->parsed()) {
            KnowledgeBase kb = load_or_derive_kb(kb_path, catalog, 5, 1e-9, 1);
            Problem problem = parse_problem_arg(problem_arg, catalog);
            PlannerConfig cfg;
            cfg.max_steps = max_steps;
            cfg.window = window;
            cfg.strategy = parse_strategy(strategy_arg);
            SolveResult res = solve(problem, kb, catalog, cfg, timeout);
            if (format == "json") {
                nlohmann::ordered_json j;
                j["problem"] = problem_slug(problem, catalog);
                j["strategy"] = strategy_name(cfg.strategy);
                j["outcome"] = res.outcome == SolveOutcome::Found
                                   ? "found"
                                   : (res.outcome == SolveOutcome::Timeout ? "timeout"
                                                                           : "exhausted");
                j["length"] = res.plan ? res.plan->length() : -1;
                j["time_sec"] = res.stats.elapsed_sec;
                j["nodes"] = res.stats.nodes;
                if (res.plan) {
                    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
                    for (const auto& s : res.plan->steps) steps.push_back(format_step(s, catalog));
                    j["plan"] = std::move(steps);
                }
                std::cout << j.dump(2) << "\n";
            } else if (res.plan) {
                std::cout << "plan of length " << res.plan->length() << " ("
                          << res.stats.nodes << " nodes, " << res.stats.elapsed_sec << " s):\n"
                          << format_plan(*res.plan, catalog);
            } else {
                std::cout << (res.outcome == SolveOutcome::Timeout ? "timeout" : "no plan")
                          << " within " << cfg.max_steps << " steps (" << res.stats.nodes
                          << " nodes, " << res.stats.elapsed_sec << " s)\n";
            }
            if (res.plan && !out_dir.empty() && solve_cmd->count("--out")) {
                fs::path p = fs::path(out_dir) / (problem_slug(problem, catalog) + ".plan");
                spit(p, format_plan(*res.plan, catalog));
                std::cout << "plan written to " << p.string() << "\n";
            }
            return res.plan ? 0 : 2;
        }

        if (emit->parsed()) {
            KnowledgeBase kb = load_or_derive_kb(kb_path, catalog, 5, 1e-9, 1);
            Problem problem = parse_problem_arg(problem_arg, catalog);
            PlannerConfig cfg;
            cfg.max_steps = max_steps;
            EmittedModel m = emit_model(problem, kb, catalog, cfg,
                                        minimize_mode ? EmitMode::Minimize
                                                      : EmitMode::FixedLength);
            auto diags = mzn::lint_model(m.model_text, m.data_text);
            if (!diags.empty()) {
                for (const auto& d : diags) std::cerr << "lint: " << d << "\n";
                return 1;
            }
            std::string slug = problem_slug(problem, catalog);
            fs::path mzn = fs::path(out_dir) / (slug + ".mzn");
            fs::path dzn = fs::path(out_dir) / (slug + ".dzn");
            spit(mzn, m.model_text);
            spit(dzn, m.data_text);
            std::cout << "model written to " << mzn.string() << "\n";
            std::cout << "data written to " << dzn.string() << "\n";
            return 0;
        }

        if (bench->parsed()) {
            KnowledgeBase kb = load_or_derive_kb(kb_path, catalog, 5, 1e-9, 1);
            auto records = parse_problem_file(slurp(problems_path), catalog);
            BenchOptions opt;
            if (bench->count("--strategy") && strategy_arg != "all")
                opt.strategies = {parse_strategy(strategy_arg)};
            opt.max_steps = max_steps;
            opt.window = window;
            opt.timeout_sec = timeout;
            opt.parallelism = parallelism;
            opt.verify_seed = seed + 776;
            BenchReport report = run_benchmark(records, kb, catalog, opt);
            spit(fs::path(out_dir) / "report.csv", report_rows_csv(report));
            spit(fs::path(out_dir) / "summary.csv", report_summary_csv(report));
            spit(fs::path(out_dir) / "report.json", report_to_json(report).dump(2) + "\n");
            spit(fs::path(out_dir) / "survival.csv", survival_csv(report));
            spit(fs::path(out_dir) / "lengths.csv", lengths_csv(report, opt.strategies));
            for (const auto& row : report.rows) {
                if (!row.solved) continue;
                spit(fs::path(out_dir) / "plans" /
                         (row.problem_id + "_" + strategy_name(row.strategy) + ".plan"),
                     row.plan_text);
            }
            if (format == "json") {
                std::cout << report_to_json(report)["summary"].dump(2) << "\n";
            } else {
                std::cout << report_summary_csv(report);
            }
            std::cout << "reports written to " << out_dir << "\n";
            return 0;
        }

        if (verify->parsed()) {
            KnowledgeBase kb = load_or_derive_kb(kb_path, catalog, 5, 1e-9, 1);
            Problem problem = parse_problem_arg(problem_arg, catalog);
            Plan plan = parse_plan(slurp(plan_path), catalog);
            auto sym = check_plan_symbolic(plan, problem, kb, catalog);
            VerificationReport num;
            if (sym.accepted)
                num = check_plan_numeric(plan, problem, catalog, samples, verify_tolerance, seed,
                                         kb);
            bool ok = sym.accepted && num.accepted;
            if (format == "json") {
                nlohmann::ordered_json j;
                j["symbolic"] = report_to_json(sym);
                if (sym.accepted) j["numeric"] = report_to_json(num);
                j["verdict"] = ok ? "accepted" : "rejected";
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "symbolic: " << (sym.accepted ? "accepted" : "rejected") << "\n";
                for (const auto& f : sym.failures)
                    std::cout << "  step " << f.step_index << ": " << f.condition << "\n";
                if (sym.accepted) {
                    std::cout << "numeric (" << num.triangles_checked
                              << " triangles): " << (num.accepted ? "accepted" : "rejected")
                              << "\n";
                    for (const auto& f : num.failures)
                        std::cout << "  step " << f.step_index << ": " << f.condition
                                  << " residual=" << (f.residual ? *f.residual : 0.0) << "\n";
                }
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
