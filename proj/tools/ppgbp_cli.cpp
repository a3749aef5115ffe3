#include "ppgbp/beats.hpp"
#include "ppgbp/error.hpp"
#include "ppgbp/io.hpp"
#include "ppgbp/protocol.hpp"
#include "ppgbp/signal.hpp"
#include "ppgbp/synth.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace ppgbp;

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out;
}

int report_error(ErrorCode code, std::string_view message) {
    std::cerr << "error: code=" << to_string(code) << " message=\"" << escape(message) << "\"\n";
    return 2;
}

struct CommonOptions {
    std::string signals;
    std::string annotations;
    std::string select = "free_run";
    bool remove_mean = false;
    double refractory_s = 0.33;
    double prominence = 0.30;

    ProtocolOptions protocol() const {
        ProtocolOptions o;
        o.selection = parse_selection(select);
        o.remove_mean = remove_mean;
        o.detector.refractory_s = refractory_s;
        o.detector.min_prominence_frac = prominence;
        return o;
    }
    SessionRecord session() const { return read_session({signals, annotations}); }
};

void add_session_options(CLI::App* cmd, CommonOptions& o, bool with_annotations = true) {
    cmd->add_option("--signals", o.signals, "signals file (fs_hz header, bp,ppg lines)")->required();
    if (with_annotations) cmd->add_option("--annotations", o.annotations, "annotations file")->required();
    cmd->add_option("--refractory", o.refractory_s, "detector refractory period in seconds");
    cmd->add_option("--prominence", o.prominence, "detector prominence fraction of the 5-95th percentile range");
}

void add_fit_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--select", o.select, "order selection criterion")
        ->check(CLI::IsMember({"free_run", "one_step"}));
    cmd->add_flag("--remove-mean", o.remove_mean, "fit and simulate on per-interval deviations from the mean");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PPG to blood-pressure ARX reconstruction toolkit"};
    app.require_subcommand(1);

    CommonOptions common;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic breath-hold session");
    std::uint64_t seed = 1;
    std::string preset = "default";
    std::string truth_path;
    std::string subject;
    double noise = -1.0;
    bool per_bh = false;
    synth->add_option("--seed", seed, "generator seed")->required();
    synth->add_option("--signals", common.signals, "output signals file")->required();
    synth->add_option("--annotations", common.annotations, "output annotations file")->required();
    synth->add_option("--preset", preset, "configuration preset")
        ->check(CLI::IsMember({"default", "exact", "paper-like"}));
    synth->add_option("--noise", noise, "envelope output noise sd in mmHg (overrides the preset)");
    synth->add_flag("--per-bh-models", per_bh, "perturb the link model per BH interval");
    synth->add_option("--subject", subject, "subject id written to the signals header");
    synth->add_option("--truth", truth_path, "optional ground-truth summary (JSON)");

    // detect
    auto* detect = app.add_subcommand("detect", "detect beats and write the beat series");
    std::string beats_out;
    double downsample_hz = 0.0;
    add_session_options(detect, common, false);
    detect->add_option("--out", beats_out, "output beat file")->required();
    detect->add_option("--downsample", downsample_hz, "decimate to this rate before detection");

    // fit
    auto* fit = app.add_subcommand("fit", "fit one BH interval and channel");
    std::string interval = "BH1", channel = "sbp", model_out, search_out;
    add_session_options(fit, common);
    add_fit_options(fit, common);
    fit->add_option("--interval", interval, "interval label, e.g. BH1");
    fit->add_option("--channel", channel, "sbp or dbp")->check(CLI::IsMember({"sbp", "dbp"}));
    fit->add_option("--model-out", model_out, "output model file")->required();
    fit->add_option("--report-out", search_out, "output search report (JSON)");

    // crossval
    auto* crossval = app.add_subcommand("crossval", "model and cross-validation errors for a session");
    std::string report_out, table_out;
    add_session_options(crossval, common);
    add_fit_options(crossval, common);
    crossval->add_option("--out", report_out, "output report (JSON)")->required();
    crossval->add_option("--table", table_out, "output human-readable tables");

    // report
    auto* report = app.add_subcommand("report", "aggregate per-subject reports");
    std::vector<std::string> inputs;
    std::string summary_out, summary_table;
    report->add_option("reports", inputs, "per-subject report files (JSON)")->required();
    report->add_option("--out", summary_out, "output summary (JSON)")->required();
    report->add_option("--table", summary_table, "output human-readable tables");

    // plotdata
    auto* plotdata = app.add_subcommand("plotdata", "measured vs estimated envelopes as CSV");
    std::string plot_out;
    bool all_pairs = false;
    add_session_options(plotdata, common);
    add_fit_options(plotdata, common);
    plotdata->add_option("--out", plot_out, "output CSV")->required();
    plotdata->add_flag("--all-pairs", all_pairs, "include cross-validation pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(ErrorCode::invalid_argument, e.what());
    }

    try {
        if (*synth) {
            SynthConfig cfg = preset == "exact"        ? SynthConfig::exact_closure(seed)
                              : preset == "paper-like" ? SynthConfig::paper_like(seed)
                                                       : SynthConfig{};
            cfg.seed = seed;
            if (!subject.empty()) cfg.subject_id = subject;
            if (noise >= 0.0) cfg.noise_sd_mmHg = noise;
            if (per_bh) cfg.shared_model = false;
            const auto result = generate(cfg);
            write_session({common.signals, common.annotations}, result.session);
            if (!truth_path.empty()) atomic_write(truth_path, synth_truth_to_json(cfg, result.truth));
        } else if (*detect) {
            const auto pair = signals_from_text(read_text(common.signals));
            UniformSignal bp = pair.bp, ppg = pair.ppg;
            if (downsample_hz > 0.0) {
                bp = downsample(bp, downsample_hz);
                ppg = downsample(ppg, downsample_hz);
            }
            const auto params = common.protocol().detector;
            atomic_write(beats_out, beats_to_text({{"sbp", detect_peaks(bp, params)},
                                                   {"dbp", detect_troughs(bp, params)},
                                                   {"ppg_peak", detect_peaks(ppg, params)},
                                                   {"ppg_trough", detect_troughs(ppg, params)}}));
        } else if (*fit) {
            const auto rep = fit_interval_report(common.session(), IntervalLabel::parse(interval),
                                                 parse_channel(channel), common.protocol());
            write_model(model_out, rep.winner());
            if (!search_out.empty()) atomic_write(search_out, search_report_to_json(rep));
        } else if (*crossval) {
            write_report(evaluate(common.session(), common.protocol()), report_out, table_out);
        } else if (*report) {
            std::vector<EvalReport> reports;
            for (const auto& path : inputs) reports.push_back(eval_report_from_json(read_text(path)));
            write_report(aggregate(reports), summary_out, summary_table);
        } else if (*plotdata) {
            atomic_write(plot_out, traces_to_csv(traces(common.session(), common.protocol(), all_pairs)));
        }
    } catch (const Error& e) {
        return report_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorCode::io_error, e.what());
    }
    return 0;
}
