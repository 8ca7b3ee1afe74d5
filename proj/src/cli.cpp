#include "watguard/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "watguard/errors.hpp"

namespace watguard::cli {

namespace {

// One exception-to-exit-code policy for every subcommand.
template <typename Fn>
int guard(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", s);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TimeWindow WindowSpec::resolve(const AccessLog& log) const {
    const auto span =
        log_span(log).value_or(TimeWindow{Instant{}, Instant{} + std::chrono::seconds{1}});

    TimeWindow w = span;
    if (last_seconds) {
        w.start = span.end - std::chrono::seconds{std::int64_t(*last_seconds)};
        w.end = span.end;
    }
    if (start) {
        const auto t = parse_iso8601(*start);
        if (!t) throw UsageError("bad window start: " + *start);
        w.start = *t;
    }
    if (end) {
        const auto t = parse_iso8601(*end);
        if (!t) throw UsageError("bad window end: " + *end);
        w.end = *t;
    }
    if (!w.valid())
        throw UsageError("window is empty: " + format_iso8601(w.start) + "/" +
                         format_iso8601(w.end));
    return w;
}

int run_train(const TrainArgs& args, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
    return guard(err, [&] {
        const AccessLog log = parse_log_file(args.log_path);
        const TimeWindow window = args.window.resolve(log);
        const TrainedWat wat = train_wat(log, window);
        save_wat(wat, args.out_path);
        if (!common.quiet)
            out << "trained users=" << wat.num_users
                << " uris=" << wat.rows.size()
                << " total_logs=" << wat.total_logs
                << " skipped=" << log.skipped << " -> "
                << args.out_path.string() << "\n";
        return kOk;
    });
}

int run_detect(const DetectArgs& args, const CommonOptions& common,
               std::ostream& out, std::ostream& err) {
    (void)common;
    return guard(err, [&] {
        const AccessLog log = parse_log_file(args.log_path);
        const TrainedWat wat = load_wat(args.wat_path);
        const TimeWindow window = args.window.resolve(log);
        const DocumentMatrix matrix = build_matrix(log, wat, window);
        save_matrix(matrix, args.matrix_out);

        const DetectionReport report = detect(matrix, wat, args.thresholds);
        const std::string text = render_report(report);
        out << text;
        if (args.report_out) write_text(*args.report_out, text);
        if (args.csv_out) write_report_csv(report, *args.csv_out);
        return report.alerts.empty() ? kOk : kAnomalies;
    });
}

int run_baseline(const BaselineArgs& args, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
    return guard(err, [&] {
        const AccessLog log = parse_log_file(args.log_path);
        const TrainedWat wat = load_wat(args.wat_path);
        const TimeWindow window = args.window.resolve(log);
        const DocumentMatrix matrix = build_matrix(log, wat, window);
        const auto vecs = user_vectors(matrix, wat, args.dims);

        const Graph g = proximity_graph(vecs, args.k, args.sigma);
        const PageRankResult pr = pagerank(g);
        if (!pr.converged && !common.quiet)
            err << "warning: pagerank stopped at " << pr.iterations
                << " iterations without converging\n";

        std::vector<ScoredUser> by_rank;
        by_rank.reserve(vecs.size());
        for (std::uint32_t i = 0; i < vecs.size(); ++i)
            by_rank.push_back(ScoredUser{g.labels[i], pr.scores[i], 0});
        std::sort(by_rank.begin(), by_rank.end(),
                  [](const ScoredUser& a, const ScoredUser& b) {
                      return a.score != b.score ? a.score < b.score
                                                : a.user < b.user;
                  });
        for (std::uint32_t i = 0; i < by_rank.size(); ++i)
            by_rank[i].rank = i + 1;

        const auto oracle = rank_users_knn_distance(vecs, args.k);

        out << "rank\tpagerank_user\tscore\tknn_user\tkth_dist\n";
        const std::size_t rows = std::min<std::size_t>(args.top, by_rank.size());
        for (std::size_t i = 0; i < rows; ++i)
            out << i + 1 << '\t' << by_rank[i].user << '\t'
                << fmt_g12(by_rank[i].score) << '\t' << oracle[i].user << '\t'
                << fmt_g12(oracle[i].score) << "\n";

        if (args.scores_out)
            write_text(*args.scores_out, serialize_scores(by_rank));
        if (args.edges_out) write_text(*args.edges_out, serialize_edges(g));
        return kOk;
    });
}

int run_simulate(const SimulateArgs& args, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
    return guard(err, [&] {
        const SiteGraph site = generate_site(
            SiteOptions{args.num_pages, 6, args.seed});

        WorkloadOptions wopt;
        wopt.num_users = args.num_users;
        wopt.seed = args.seed;
        wopt.duration_seconds = args.duration_seconds;
        wopt.session.mean_session_len = args.mean_session_len;
        const AccessLog normal = simulate_normal(site, wopt);

        AccessLog merged = normal;
        std::string target;
        std::size_t attack_records = 0;
        if (args.with_attack) {
            AttackOptions aopt;
            aopt.ip = args.attack_ip;
            aopt.target = args.attack_target;
            aopt.attempts = args.attack_attempts;
            const AccessLog attack = simulate_attack(site, aopt);
            target = attack.records.front().uri;
            attack_records = attack.records.size();
            merged = merge_logs({normal, attack});
        }

        write_log_file(merged, args.out_path, common.log_format);
        if (args.site_out) write_text(*args.site_out, serialize_site(site));

        if (!common.quiet) {
            out << "normal records=" << normal.records.size()
                << " users=" << args.num_users << " seed=" << args.seed
                << " rng=mt19937_64\n";
            if (args.with_attack)
                out << "attack records=" << attack_records
                    << " ip=" << args.attack_ip << " target=" << target
                    << "\n";
            out << "wrote " << merged.records.size() << " records -> "
                << args.out_path.string() << "\n";
        }
        return kOk;
    });
}

double fit_exponent(const std::vector<std::uint32_t>& sizes,
                    const std::vector<double>& times) {
    const std::size_t n = sizes.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(double(sizes[i]));
        ys[i] = std::log(std::max(times[i], 1e-9));
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

int run_bench(const BenchArgs& args, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
    return guard(err, [&] {
        if (args.sizes.size() < 2)
            throw UsageError("bench needs at least 2 sizes");
        if (args.reps < 1) throw UsageError("reps must be >= 1");

        const SiteGraph site =
            generate_site(SiteOptions{60, 4, args.seed});
        const Thresholds th{0.05, 3.0, 1, 0.10};

        auto timed = [](auto&& fn) {
            const auto t0 = std::chrono::steady_clock::now();
            fn();
            const std::chrono::duration<double> dt =
                std::chrono::steady_clock::now() - t0;
            return dt.count();
        };

        // One untimed pass at the largest size; without it the smallest
        // rows pay for cpu frequency ramp-up and skew the fitted exponent.
        {
            WorkloadOptions wopt;
            wopt.num_users = std::max(
                2u, *std::max_element(args.sizes.begin(), args.sizes.end()) /
                        4);
            wopt.seed = args.seed;
            wopt.session.mean_session_len = 4.0;
            const AccessLog log = simulate_normal(site, wopt);
            const TimeWindow window = *log_span(log);
            const TrainedWat wat = train_wat(log, window);
            const DocumentMatrix matrix = build_matrix(log, wat, window);
            detect(matrix, wat, th);
            pagerank(proximity_graph(user_vectors(matrix, wat, 32), args.k));
        }

        std::vector<double> wat_times, graph_times;
        if (!common.quiet) out << "lane\trecords\tseconds\n";
        for (const std::uint32_t size : args.sizes) {
            WorkloadOptions wopt;
            wopt.num_users = std::max(2u, size / 4);
            wopt.seed = args.seed;
            wopt.session.mean_session_len = 4.0;
            const AccessLog log = simulate_normal(site, wopt);
            const TimeWindow window = *log_span(log);

            std::vector<double> wat_reps, graph_reps;
            for (std::uint32_t r = 0; r < args.reps; ++r) {
                TrainedWat wat;
                DocumentMatrix matrix;
                wat_reps.push_back(timed([&] {
                    wat = train_wat(log, window);
                    matrix = build_matrix(log, wat, window);
                    detect(matrix, wat, th);
                }));
                graph_reps.push_back(timed([&] {
                    const auto vecs = user_vectors(matrix, wat, 32);
                    const Graph g = proximity_graph(vecs, args.k);
                    pagerank(g);
                }));
            }
            wat_times.push_back(median(wat_reps));
            graph_times.push_back(median(graph_reps));
            out << "wat\t" << size << '\t' << fmt_seconds(wat_times.back())
                << "\n";
            out << "graph\t" << size << '\t'
                << fmt_seconds(graph_times.back()) << "\n";
        }

        char fit[64];
        std::snprintf(fit, sizeof fit, "#fit wat=%.3f graph=%.3f\n",
                      fit_exponent(args.sizes, wat_times),
                      fit_exponent(args.sizes, graph_times));
        out << fit;
        return kOk;
    });
}

int run_report(const ReportArgs& args, const CommonOptions& common,
               std::ostream& out, std::ostream& err) {
    (void)common;
    return guard(err, [&] {
        std::ifstream in(args.csv_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + args.csv_path.string());
        std::vector<Alert> alerts =
            parse_report_csv(in, args.csv_path.string());

        std::sort(alerts.begin(), alerts.end(),
                  [](const Alert& a, const Alert& b) {
                      if (a.deviation != b.deviation)
                          return a.deviation > b.deviation;
                      if (a.user != b.user) return a.user < b.user;
                      return a.uri < b.uri;
                  });

        std::set<std::string_view> users;
        std::size_t over = 0;
        for (const Alert& a : alerts) {
            users.insert(a.user);
            if (a.direction == Direction::Over) ++over;
        }
        const std::size_t rows = std::min<std::size_t>(args.top, alerts.size());
        for (std::size_t i = 0; i < rows; ++i)
            out << format_alert(alerts[i]) << "\n";
        out << "#alerts=" << alerts.size() << " users_flagged=" << users.size()
            << " over=" << over << " under=" << alerts.size() - over << "\n";
        return alerts.empty() ? kOk : kAnomalies;
    });
}

}  // namespace watguard::cli
