#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tricons/catalog.hpp"
#include "tricons/knowledge_base.hpp"
#include "tricons/planner.hpp"
#include "tricons/verifier.hpp"

namespace tricons {

struct ProblemFileError : std::runtime_error {
    int line = 0;
    ProblemFileError(const std::string& what, int line_)
        : std::runtime_error(what + " at line " + std::to_string(line_)), line(line_) {}
};

struct ProblemRecord {
    std::string id;
    std::array<std::string, 3> given;
    std::string status; // solvable | redundant | locus-dependent | unsolvable | unknown

    Problem problem(const Catalog& catalog) const {
        return Problem::from_names(catalog, given[0], given[1], given[2]);
    }
};

/// Parses the problem list: CSV `id,given1,given2,given3,status`, `#`
/// comments and blank lines ignored. Errors carry the line number.
inline std::vector<ProblemRecord> parse_problem_file(const std::string& text,
                                                     const Catalog& catalog) {
    static const char* kStatuses[] = {"solvable", "redundant", "locus-dependent", "unsolvable",
                                      "unknown"};
    std::vector<ProblemRecord> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        for (auto& f : fields) {
            size_t b = f.find_first_not_of(" \t");
            size_t e = f.find_last_not_of(" \t");
            f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
        }
        if (fields.size() != 5) throw ProblemFileError("expected 5 comma-separated fields", line_no);
        ProblemRecord rec;
        rec.id = fields[0];
        for (int i = 0; i < 3; ++i) {
            const std::string& name = fields[static_cast<size_t>(i) + 1];
            if (!catalog.has(name) || catalog.id(name).kind != Kind::Point)
                throw ProblemFileError("unknown point name " + name, line_no);
            rec.given[static_cast<size_t>(i)] = name;
        }
        if (rec.given[0] == rec.given[1] || rec.given[0] == rec.given[2] ||
            rec.given[1] == rec.given[2])
            throw ProblemFileError("duplicate point in problem " + rec.id, line_no);
        bool ok = false;
        for (const char* s : kStatuses) ok = ok || fields[4] == s;
        if (!ok) throw ProblemFileError("unknown status " + fields[4], line_no);
        rec.status = fields[4];
        out.push_back(std::move(rec));
    }
    return out;
}

struct BenchRow {
    std::string problem_id;
    Strategy strategy = Strategy::Linear;
    bool solved = false;
    int length = -1; // -1 when unsolved
    double time_sec = 0;
    uint64_t nodes = 0;
    bool verified = false;
    SolveOutcome outcome = SolveOutcome::Exhausted;
    std::string plan_text; // formatted plan of a solved row
};

struct StrategySummary {
    Strategy strategy = Strategy::Linear;
    int total = 0;
    int solved = 0;
    double avg_time = 0;
    double median_time = 0;
    double avg_time_solved = 0;
    double avg_length = 0; // over solved rows only
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<StrategySummary> summaries;
};

struct BenchOptions {
    std::vector<Strategy> strategies{Strategy::Linear, Strategy::Minimization,
                                     Strategy::Incremental};
    int max_steps = 11;
    int window = 3;
    double timeout_sec = 60.0;
    int parallelism = 1;
    int verify_samples = 5;
    double verify_tolerance = 1e-7;
    uint64_t verify_seed = 777;
};

/// Summaries are recomputable from the rows; `avg_length` is over solved rows
/// only, time averages follow the benchmark convention (all rows vs solved).
inline std::vector<StrategySummary> summarize(const std::vector<BenchRow>& rows,
                                              const std::vector<Strategy>& strategies) {
    std::vector<StrategySummary> out;
    for (Strategy st : strategies) {
        StrategySummary s;
        s.strategy = st;
        std::vector<double> times;
        double time_sum = 0, time_solved = 0, len_sum = 0;
        for (const auto& r : rows) {
            if (r.strategy != st) continue;
            ++s.total;
            times.push_back(r.time_sec);
            time_sum += r.time_sec;
            if (r.solved) {
                ++s.solved;
                time_solved += r.time_sec;
                len_sum += r.length;
            }
        }
        if (s.total) {
            std::sort(times.begin(), times.end());
            s.avg_time = time_sum / s.total;
            s.median_time = times.size() % 2 ? times[times.size() / 2]
                                             : (times[times.size() / 2 - 1] +
                                                times[times.size() / 2]) / 2.0;
        }
        if (s.solved) {
            s.avg_time_solved = time_solved / s.solved;
            s.avg_length = len_sum / s.solved;
        }
        out.push_back(s);
    }
    return out;
}

/// Runs every (problem, strategy) pair, verifying each found plan before it
/// counts as solved. Worker scheduling never affects any non-time field.
inline BenchReport run_benchmark(const std::vector<ProblemRecord>& records,
                                 const KnowledgeBase& kb, const Catalog& catalog,
                                 const BenchOptions& options) {
    const StepTable table(kb, catalog);
    struct Task {
        size_t record;
        size_t strategy;
    };
    std::vector<Task> tasks;
    for (size_t r = 0; r < records.size(); ++r)
        for (size_t s = 0; s < options.strategies.size(); ++s) tasks.push_back(Task{r, s});

    BenchReport report;
    report.rows.resize(tasks.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const ProblemRecord& rec = records[task.record];
            Problem problem = rec.problem(catalog);
            PlannerConfig cfg;
            cfg.max_steps = options.max_steps;
            cfg.window = options.window;
            cfg.strategy = options.strategies[task.strategy];
            SolveResult res = solve(problem, table, cfg, options.timeout_sec);
            BenchRow row;
            row.problem_id = rec.id;
            row.strategy = cfg.strategy;
            row.time_sec = res.stats.elapsed_sec;
            row.nodes = res.stats.nodes;
            row.outcome = res.outcome;
            if (res.plan) {
                bool sym = check_plan_symbolic(*res.plan, problem, kb, catalog).accepted;
                bool num = sym && check_plan_numeric(*res.plan, problem, catalog,
                                                     options.verify_samples,
                                                     options.verify_tolerance,
                                                     options.verify_seed, kb)
                                      .accepted;
                row.verified = sym && num;
                row.solved = row.verified;
                if (row.solved) {
                    row.length = res.plan->length();
                    row.plan_text = format_plan(*res.plan, catalog);
                }
            }
            report.rows[t] = std::move(row);
        }
    };

    int nthreads = std::max(1, options.parallelism);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    report.summaries = summarize(report.rows, options.strategies);
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization.

inline std::string report_rows_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "problem,strategy,solved,length,time_sec,nodes,verified,outcome\n";
    for (const auto& r : report.rows) {
        os << r.problem_id << ',' << strategy_name(r.strategy) << ',' << (r.solved ? 1 : 0) << ','
           << r.length << ',' << r.time_sec << ',' << r.nodes << ',' << (r.verified ? 1 : 0)
           << ','
           << (r.outcome == SolveOutcome::Found
                   ? "found"
                   : (r.outcome == SolveOutcome::Timeout ? "timeout" : "exhausted"))
           << '\n';
    }
    return os.str();
}

inline std::string report_summary_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "strategy,solved,avg_time,median_time,avg_time_solved,avg_length\n";
    for (const auto& s : report.summaries) {
        os << strategy_name(s.strategy) << ',' << s.solved << ',' << s.avg_time << ','
           << s.median_time << ',' << s.avg_time_solved << ',' << s.avg_length << '\n';
    }
    return os.str();
}

inline nlohmann::ordered_json report_to_json(const BenchReport& report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json o;
        o["problem"] = r.problem_id;
        o["strategy"] = strategy_name(r.strategy);
        o["solved"] = r.solved;
        o["length"] = r.length;
        o["time_sec"] = r.time_sec;
        o["nodes"] = r.nodes;
        o["verified"] = r.verified;
        o["outcome"] = r.outcome == SolveOutcome::Found
                           ? "found"
                           : (r.outcome == SolveOutcome::Timeout ? "timeout" : "exhausted");
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    nlohmann::ordered_json sums = nlohmann::ordered_json::array();
    for (const auto& s : report.summaries) {
        nlohmann::ordered_json o;
        o["strategy"] = strategy_name(s.strategy);
        o["solved"] = s.solved;
        o["avg_time"] = s.avg_time;
        o["median_time"] = s.median_time;
        o["avg_time_solved"] = s.avg_time_solved;
        o["avg_length"] = s.avg_length;
        sums.push_back(std::move(o));
    }
    j["summary"] = std::move(sums);
    return j;
}

/// Survival-plot data: per strategy, solved-row times sorted ascending with
/// the cumulative number solved.
inline std::string survival_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "strategy,time_sec,cumulative_solved\n";
    std::map<Strategy, std::vector<double>> times;
    for (const auto& r : report.rows)
        if (r.solved) times[r.strategy].push_back(r.time_sec);
    for (auto& [st, ts] : times) {
        std::sort(ts.begin(), ts.end());
        for (size_t i = 0; i < ts.size(); ++i)
            os << strategy_name(st) << ',' << ts[i] << ',' << (i + 1) << '\n';
    }
    return os.str();
}

/// Length-comparison data: one row per problem, plan length per strategy
/// (-1 when unsolved).
inline std::string lengths_csv(const BenchReport& report,
                               const std::vector<Strategy>& strategies) {
    std::ostringstream os;
    os << "problem";
    for (Strategy st : strategies) os << ',' << strategy_name(st);
    os << '\n';
    std::vector<std::string> order;
    std::map<std::string, std::map<Strategy, int>> lengths;
    for (const auto& r : report.rows) {
        if (!lengths.count(r.problem_id)) order.push_back(r.problem_id);
        lengths[r.problem_id][r.strategy] = r.length;
    }
    for (const auto& id : order) {
        os << id;
        for (Strategy st : strategies) {
            auto it = lengths[id].find(st);
            os << ',' << (it == lengths[id].end() ? -1 : it->second);
        }
        os << '\n';
    }
    return os.str();
}

} // namespace tricons
