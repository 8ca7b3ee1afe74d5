#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "watguard/cli.hpp"

namespace {

using namespace watguard;

struct WindowFlags {
    std::string start, end;
    std::uint64_t last = 0;
    CLI::Option* start_opt = nullptr;
    CLI::Option* end_opt = nullptr;
    CLI::Option* last_opt = nullptr;

    void attach(CLI::App* sub) {
        start_opt = sub->add_option("--window-start", start,
                                    "window start, iso-8601 (inclusive)");
        end_opt = sub->add_option("--window-end", end,
                                  "window end, iso-8601 (exclusive)");
        last_opt = sub->add_option("--window-last", last,
                                   "use the trailing N seconds of the log")
                       ->check(CLI::PositiveNumber);
        last_opt->excludes(start_opt)->excludes(end_opt);
    }

    cli::WindowSpec spec() const {
        cli::WindowSpec s;
        if (start_opt->count()) s.start = start;
        if (end_opt->count()) s.end = end;
        if (last_opt->count()) s.last_seconds = last;
        return s;
    }
};

void attach_thresholds(CLI::App* sub, Thresholds& th) {
    sub->add_option("--theta", th.theta_abs,
                    "absolute frequency-deviation threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--k-sigma", th.k_sigma,
                    "std-deviation multiplier (0 disables)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--min-requests", th.min_requests,
                    "skip users with fewer window requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--underflow-floor", th.underflow_floor,
                    "min trained mean for underflow checks (>1 disables)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"web access-log anomaly toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags win");

    std::string log_format = "combined";
    bool quiet = false;
    app.add_option("--log-format", log_format, "log text dialect")
        ->check(CLI::IsMember({"combined", "common"}))
        ->capture_default_str();
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto common = [&] {
        return cli::CommonOptions{log_format == "common" ? LogFormat::Common
                                                         : LogFormat::Combined,
                                  quiet};
    };
    int rc = cli::kOk;

    // train
    auto* train = app.add_subcommand("train", "learn the access table");
    train->fallthrough();
    std::string train_log, train_out = "trained.dat";
    WindowFlags train_win;
    train->add_option("log", train_log, "training access log")->required();
    train->add_option("-o,--out", train_out, "table output path")
        ->capture_default_str();
    train_win.attach(train);
    train->callback([&] {
        cli::TrainArgs a;
        a.log_path = train_log;
        a.out_path = train_out;
        a.window = train_win.spec();
        rc = cli::run_train(a, common(), std::cout, std::cerr);
    });

    // detect
    auto* detect = app.add_subcommand("detect", "flag anomalous users");
    detect->fallthrough();
    std::string det_log, det_wat = "trained.dat", det_matrix = "am_test.dat";
    std::string det_report, det_csv;
    Thresholds det_th;
    WindowFlags det_win;
    detect->add_option("log", det_log, "access log to judge")->required();
    detect->add_option("-w,--wat", det_wat, "trained table path")
        ->capture_default_str();
    detect->add_option("--matrix-out", det_matrix, "per-user matrix output")
        ->capture_default_str();
    auto* det_report_opt =
        detect->add_option("--report-out", det_report, "alert text copy");
    auto* det_csv_opt =
        detect->add_option("--csv-out", det_csv, "alert csv output");
    attach_thresholds(detect, det_th);
    det_win.attach(detect);
    detect->callback([&] {
        cli::DetectArgs a;
        a.log_path = det_log;
        a.wat_path = det_wat;
        a.matrix_out = det_matrix;
        if (det_report_opt->count()) a.report_out = det_report;
        if (det_csv_opt->count()) a.csv_out = det_csv;
        a.thresholds = det_th;
        a.window = det_win.spec();
        rc = cli::run_detect(a, common(), std::cout, std::cerr);
    });

    // baseline
    auto* baseline = app.add_subcommand(
        "baseline", "proximity-graph + pagerank anomaly ranking");
    baseline->fallthrough();
    std::string base_log, base_wat = "trained.dat", base_scores, base_edges;
    cli::BaselineArgs base_defaults;
    std::uint32_t base_k = base_defaults.k, base_dims = base_defaults.dims;
    std::uint32_t base_top = base_defaults.top;
    double base_sigma = base_defaults.sigma;
    WindowFlags base_win;
    baseline->add_option("log", base_log, "access log to judge")->required();
    baseline->add_option("-w,--wat", base_wat, "trained table path")
        ->capture_default_str();
    baseline->add_option("-k,--k", base_k, "neighbors per node")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    baseline->add_option("--sigma", base_sigma,
                         "kernel bandwidth (<=0 self-tunes)");
    baseline->add_option("--dims", base_dims, "feature vector length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    baseline->add_option("--top", base_top, "ranking rows to print")
        ->capture_default_str();
    auto* base_scores_opt =
        baseline->add_option("--scores-out", base_scores, "score csv output");
    auto* base_edges_opt =
        baseline->add_option("--edges-out", base_edges, "edge dump output");
    base_win.attach(baseline);
    baseline->callback([&] {
        cli::BaselineArgs a;
        a.log_path = base_log;
        a.wat_path = base_wat;
        a.k = base_k;
        a.sigma = base_sigma;
        a.dims = base_dims;
        a.top = base_top;
        if (base_scores_opt->count()) a.scores_out = base_scores;
        if (base_edges_opt->count()) a.edges_out = base_edges;
        a.window = base_win.spec();
        rc = cli::run_baseline(a, common(), std::cout, std::cerr);
    });

    // simulate
    auto* simulate =
        app.add_subcommand("simulate", "generate seeded synthetic traffic");
    simulate->fallthrough();
    cli::SimulateArgs sim;
    std::string sim_out = "access.log", sim_site;
    simulate->add_option("-o,--out", sim_out, "access log output path")
        ->capture_default_str();
    simulate->add_option("--users", sim.num_users, "normal user count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "simulation seed")
        ->capture_default_str();
    simulate->add_option("--pages", sim.num_pages, "site page count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate
        ->add_option("--session-len", sim.mean_session_len,
                     "mean requests per user")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--duration", sim.duration_seconds,
                         "traffic window length, seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_flag("--attack", sim.with_attack, "append a flood attacker");
    simulate->add_option("--attack-ip", sim.attack_ip, "attacker address")
        ->capture_default_str();
    simulate->add_option("--attack-target", sim.attack_target,
                         "flooded page (default: deepest page)");
    simulate->add_option("--attack-count", sim.attack_attempts,
                         "flood request count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* sim_site_opt =
        simulate->add_option("--site-out", sim_site, "site graph dump path");
    simulate->callback([&] {
        sim.out_path = sim_out;
        if (sim_site_opt->count()) sim.site_out = sim_site;
        rc = cli::run_simulate(sim, common(), std::cout, std::cerr);
    });

    // bench
    auto* bench = app.add_subcommand("bench", "scaling comparison of lanes");
    bench->fallthrough();
    cli::BenchArgs ben;
    bench->add_option("--sizes", ben.sizes, "record counts to run")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--reps", ben.reps, "repetitions per size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--seed", ben.seed, "workload seed")
        ->capture_default_str();
    bench->add_option("-k,--k", ben.k, "neighbors per node")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->callback(
        [&] { rc = cli::run_bench(ben, common(), std::cout, std::cerr); });

    // report
    auto* report =
        app.add_subcommand("report", "render a saved alert csv");
    report->fallthrough();
    cli::ReportArgs rep;
    std::string rep_csv;
    report->add_option("csv", rep_csv, "alert csv from detect")->required();
    report->add_option("--top", rep.top, "alert lines to print")
        ->capture_default_str();
    report->callback([&] {
        rep.csv_path = rep_csv;
        rc = cli::run_report(rep, common(), std::cout, std::cerr);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    }
    return rc;
}
