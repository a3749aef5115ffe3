#include "ppgbp/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

namespace ppgbp {

namespace {

constexpr double k_grid_eps = 1e-9;

UniformSignal demeaned(const UniformSignal& s, double& mean_out) {
    const auto x = s.samples();
    mean_out = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v -= mean_out;
    return UniformSignal(s.fs_hz(), s.start_s(), s.unit(), std::move(out));
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
    throw Error(e.code(), context + ": " + e.what());
}

std::string context_of(IntervalLabel label, Channel channel) {
    std::string ch(to_string(channel));
    std::transform(ch.begin(), ch.end(), ch.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return label.str() + " " + ch;
}

SearchReport search_interval(const IntervalEnvelopes& iv, Channel channel, const ProtocolOptions& options) {
    if (!options.remove_mean) {
        return search_orders(iv.output(channel), iv.input(channel), options.grid, options.selection);
    }
    double my = 0.0, mu = 0.0;
    const auto y = demeaned(iv.output(channel), my);
    const auto u = demeaned(iv.input(channel), mu);
    return search_orders(y, u, options.grid, options.selection);
}

Cell failed_cell(ErrorCode code, std::string message) {
    Cell c;
    c.error = code;
    c.message = std::move(message);
    return c;
}

Cell stats_cell(const std::vector<double>& errors) {
    try {
        auto stats = ErrorStats::from_errors(errors);
        if (!std::isfinite(stats.rmse) || !std::isfinite(stats.std)) {
            return failed_cell(ErrorCode::diverged, "free-run estimate diverged");
        }
        return Cell{stats, std::nullopt, {}};
    } catch (const Error& e) {
        return failed_cell(e.code(), e.what());
    }
}

}  // namespace

std::string_view to_string(Channel c) {
    return c == Channel::sbp ? "sbp" : "dbp";
}

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::sbp: return "sbp";
        case Measure::dbp: return "dbp";
        case Measure::mbp: return "mbp";
    }
    return {};
}

Channel parse_channel(std::string_view text) {
    if (text == "sbp" || text == "SBP") return Channel::sbp;
    if (text == "dbp" || text == "DBP") return Channel::dbp;
    fail(ErrorCode::parse_error, "unknown channel '" + std::string(text) + "' (expected sbp or dbp)");
}

Segmentation segment(const SessionRecord& session) {
    const auto bhs = session.bh_intervals();
    if (bhs.empty()) fail(ErrorCode::missing_annotation, "session has no BH interval");
    Segmentation out;
    for (const auto& a : session.annotations()) {
        out.segments.push_back({a.label, slice(session.bp(), a.start_s, a.end_s),
                                slice(session.ppg(), a.start_s, a.end_s)});
    }
    std::vector<std::string> missing;
    for (int k = 1; k <= 5; ++k) {
        if (!session.find(IntervalLabel::bh(k))) missing.push_back(IntervalLabel::bh(k).str());
    }
    if (!missing.empty()) {
        out.partial = true;
        out.warning = "partial protocol, missing";
        for (const auto& m : missing) out.warning += " " + m;
    }
    return out;
}

UniformSignal mbp(const UniformSignal& sbp, const UniformSignal& dbp) {
    if (sbp.size() != dbp.size() || sbp.fs_hz() != dbp.fs_hz() || sbp.start_s() != dbp.start_s()) {
        fail(ErrorCode::shape_mismatch, "SBP and DBP must share length, rate and start time");
    }
    if (sbp.unit() != Unit::mmHg || dbp.unit() != Unit::mmHg) {
        fail(ErrorCode::unit_mismatch, "MBP needs SBP and DBP in mmHg");
    }
    std::vector<double> out(sbp.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (2.0 * dbp[k] + sbp[k]) / 3.0;
    return UniformSignal(sbp.fs_hz(), sbp.start_s(), Unit::mmHg, std::move(out));
}

SessionEnvelopes build_envelopes(const SessionRecord& session, const DetectorParams& params) {
    auto sbp_beats = detect_peaks(session.bp(), params);
    auto dbp_beats = detect_troughs(session.bp(), params);
    auto ppg_peaks = detect_peaks(session.ppg(), params);
    auto ppg_troughs = detect_troughs(session.ppg(), params);
    auto sbp = fit_spline(sbp_beats);
    auto dbp = fit_spline(dbp_beats);
    auto pp = fit_spline(ppg_peaks);
    auto pt = fit_spline(ppg_troughs);
    return {std::move(sbp_beats), std::move(dbp_beats), std::move(ppg_peaks), std::move(ppg_troughs),
            std::move(sbp), std::move(dbp), std::move(pp), std::move(pt)};
}

IntervalEnvelopes interval_envelopes(const SessionEnvelopes& env, const IntervalAnnotation& interval) {
    const double lo = std::max({interval.start_s, env.sbp.front(), env.dbp.front(), env.ppg_peak.front(),
                                env.ppg_trough.front()});
    const double hi = std::min({interval.end_s, env.sbp.back(), env.dbp.back(), env.ppg_peak.back(),
                                env.ppg_trough.back()});
    const double m_lo = std::ceil(lo * k_model_fs_hz - k_grid_eps);
    const double m_hi = std::floor(hi * k_model_fs_hz + k_grid_eps);
    if (!(m_hi > m_lo)) {
        fail(ErrorCode::too_short, "interval " + interval.label.str() + " has no envelope overlap");
    }
    const double t0 = m_lo / k_model_fs_hz;
    const double t1 = m_hi / k_model_fs_hz;
    return {interval.label, eval_on_grid(env.sbp, k_model_fs_hz, t0, t1),
            eval_on_grid(env.dbp, k_model_fs_hz, t0, t1), eval_on_grid(env.ppg_peak, k_model_fs_hz, t0, t1),
            eval_on_grid(env.ppg_trough, k_model_fs_hz, t0, t1)};
}

SearchReport fit_interval_report(const SessionRecord& session, IntervalLabel interval, Channel channel,
                                 const ProtocolOptions& options) {
    const auto ann = session.find(interval);
    if (!ann) fail(ErrorCode::missing_annotation, "interval " + interval.str() + " not annotated");
    try {
        const auto env = build_envelopes(session, options.detector);
        return search_interval(interval_envelopes(env, *ann), channel, options);
    } catch (const Error& e) {
        rethrow_with_context(e, context_of(interval, channel));
    }
}

ArxModel fit_interval(const SessionRecord& session, IntervalLabel interval, Channel channel,
                      const ProtocolOptions& options) {
    return fit_interval_report(session, interval, channel, options).winner();
}

ChannelErrors channel_errors(const ArxModel& model, const IntervalEnvelopes& target, Channel channel,
                             bool remove_mean) {
    const auto& y = target.output(channel);
    const auto& u = target.input(channel);
    const std::size_t m0 = model.orders.m0();
    if (y.size() <= m0 + 1) fail(ErrorCode::too_short, "target interval shorter than the model seed");

    double my = 0.0, mu = 0.0;
    std::vector<double> estimated;
    if (remove_mean) {
        const auto yd = demeaned(y, my);
        const auto ud = demeaned(u, mu);
        const auto sim = simulate(model, ud, yd.samples().first(m0));
        estimated.assign(sim.samples().begin(), sim.samples().end());
        for (auto& v : estimated) v += my;
    } else {
        const auto sim = simulate(model, u, y.samples().first(m0));
        estimated.assign(sim.samples().begin(), sim.samples().end());
    }

    ChannelErrors out;
    out.first_index = m0;
    const auto ys = y.samples();
    for (std::size_t m = m0; m < ys.size(); ++m) {
        out.measured.push_back(ys[m]);
        out.estimated.push_back(estimated[m]);
        out.errors.push_back(ys[m] - estimated[m]);
    }
    return out;
}

ChannelErrors mbp_errors(const ChannelErrors& sbp, const ChannelErrors& dbp) {
    const std::size_t first = std::max(sbp.first_index, dbp.first_index);
    const std::size_t end = std::min(sbp.first_index + sbp.errors.size(), dbp.first_index + dbp.errors.size());
    ChannelErrors out;
    out.first_index = first;
    for (std::size_t m = first; m < end; ++m) {
        const std::size_t is = m - sbp.first_index;
        const std::size_t id = m - dbp.first_index;
        const double meas = (2.0 * dbp.measured[id] + sbp.measured[is]) / 3.0;
        const double est = (2.0 * dbp.estimated[id] + sbp.estimated[is]) / 3.0;
        out.measured.push_back(meas);
        out.estimated.push_back(est);
        out.errors.push_back(meas - est);
    }
    return out;
}

EvalReport evaluate(const SessionRecord& session, const ProtocolOptions& options) {
    const auto bh_annotations = session.bh_intervals();
    if (bh_annotations.size() < 2) {
        fail(ErrorCode::missing_annotation, "cross-validation needs at least 2 BH intervals, session has " +
                                                std::to_string(bh_annotations.size()));
    }

    EvalReport report;
    report.subject_id = session.subject_id();
    report.selection = options.selection;
    for (const auto& a : bh_annotations) report.bh.push_back(a.label.index);
    std::sort(report.bh.begin(), report.bh.end());
    report.partial = segment(session).partial;

    const auto env = build_envelopes(session, options.detector);

    // Interval envelopes per BH; a failure here fails every cell touching that interval.
    std::map<int, IntervalEnvelopes> data;
    std::map<int, Cell> data_errors;
    for (int k : report.bh) {
        try {
            data.emplace(k, interval_envelopes(env, *session.find(IntervalLabel::bh(k))));
        } catch (const Error& e) {
            data_errors[k] = failed_cell(e.code(), e.what());
        }
    }

    const std::array<Channel, 2> channels{Channel::sbp, Channel::dbp};
    std::map<std::pair<int, Channel>, ArxModel> models;
    std::map<std::pair<int, Channel>, Cell> model_errors;
    for (int k : report.bh) {
        for (Channel ch : channels) {
            ModelEntry entry;
            entry.bh = k;
            entry.channel = ch;
            if (auto it = data_errors.find(k); it != data_errors.end()) {
                entry.error = it->second.error;
                entry.message = it->second.message;
                model_errors[{k, ch}] = it->second;
            } else {
                try {
                    entry.model = search_interval(data.at(k), ch, options).winner();
                    models.emplace(std::make_pair(k, ch), *entry.model);
                } catch (const Error& e) {
                    entry.error = e.code();
                    entry.message = context_of(IntervalLabel::bh(k), ch) + ": " + e.what();
                    model_errors[{k, ch}] = failed_cell(e.code(), entry.message);
                }
            }
            report.models.push_back(std::move(entry));
        }
    }

    // Errors for every (model, target) pair, the diagonal included.
    struct PairErrors {
        std::optional<ChannelErrors> channel[2];
        Cell failure[2];
    };
    auto run_pair = [&](int i, int j) {
        PairErrors pe;
        for (std::size_t c = 0; c < 2; ++c) {
            const Channel ch = channels[c];
            if (auto it = model_errors.find({i, ch}); it != model_errors.end()) {
                pe.failure[c] = it->second;
                continue;
            }
            if (auto it = data_errors.find(j); it != data_errors.end()) {
                pe.failure[c] = it->second;
                continue;
            }
            try {
                pe.channel[c] = channel_errors(models.at({i, ch}), data.at(j), ch, options.remove_mean);
            } catch (const Error& e) {
                pe.failure[c] = failed_cell(e.code(), e.what());
            }
        }
        return pe;
    };
    auto cell_for = [](const PairErrors& pe, Measure m) {
        if (m == Measure::mbp) {
            if (!pe.channel[0]) return pe.failure[0];
            if (!pe.channel[1]) return pe.failure[1];
            return stats_cell(mbp_errors(*pe.channel[0], *pe.channel[1]).errors);
        }
        const std::size_t c = m == Measure::sbp ? 0 : 1;
        if (!pe.channel[c]) return pe.failure[c];
        return stats_cell(pe.channel[c]->errors);
    };

    for (std::size_t mi = 0; mi < 3; ++mi) report.measures[mi].measure = static_cast<Measure>(mi);
    for (int i : report.bh) {
        for (int j : report.bh) {
            const auto pe = run_pair(i, j);
            for (std::size_t mi = 0; mi < 3; ++mi) {
                auto cell = cell_for(pe, static_cast<Measure>(mi));
                if (i == j) {
                    report.measures[mi].model.push_back(std::move(cell));
                } else {
                    report.measures[mi].pairs.push_back({i, j, std::move(cell)});
                }
            }
        }
    }
    for (auto& mr : report.measures) {
        for (int j : report.bh) {
            std::vector<ErrorStats> parts;
            const PairCell* first_failure = nullptr;
            for (const auto& p : mr.pairs) {
                if (p.target_bh != j) continue;
                if (p.cell.ok()) {
                    parts.push_back(*p.cell.stats);
                } else if (first_failure == nullptr) {
                    first_failure = &p;
                }
            }
            if (first_failure != nullptr) {
                mr.pooled_cv.push_back(failed_cell(*first_failure->cell.error,
                                                   "pair BH" + std::to_string(first_failure->model_bh) + "->BH" +
                                                       std::to_string(j) + " failed: " +
                                                       first_failure->cell.message));
            } else {
                mr.pooled_cv.push_back(Cell{ErrorStats::pool(parts), std::nullopt, {}});
            }
        }
    }
    return report;
}

std::vector<Trace> traces(const SessionRecord& session, const ProtocolOptions& options, bool all_pairs) {
    const auto env = build_envelopes(session, options.detector);
    std::map<int, IntervalEnvelopes> data;
    std::map<int, std::pair<ArxModel, ArxModel>> models;
    for (const auto& a : session.bh_intervals()) {
        try {
            auto iv = interval_envelopes(env, a);
            auto sbp = search_interval(iv, Channel::sbp, options).winner();
            auto dbp = search_interval(iv, Channel::dbp, options).winner();
            models.emplace(a.label.index, std::make_pair(std::move(sbp), std::move(dbp)));
            data.emplace(a.label.index, std::move(iv));
        } catch (const Error&) {
        }
    }
    std::vector<Trace> out;
    for (const auto& [i, pair] : models) {
        for (const auto& [j, target] : data) {
            if (i != j && !all_pairs) continue;
            try {
                auto es = channel_errors(pair.first, target, Channel::sbp, options.remove_mean);
                auto ed = channel_errors(pair.second, target, Channel::dbp, options.remove_mean);
                auto em = mbp_errors(es, ed);
                const double t0 = target.sbp.start_s();
                const double dt = 1.0 / k_model_fs_hz;
                out.push_back({i, j, Measure::sbp, t0 + static_cast<double>(es.first_index) * dt, std::move(es)});
                out.push_back({i, j, Measure::dbp, t0 + static_cast<double>(ed.first_index) * dt, std::move(ed)});
                out.push_back({i, j, Measure::mbp, t0 + static_cast<double>(em.first_index) * dt, std::move(em)});
            } catch (const Error&) {
            }
        }
    }
    return out;
}

Summary aggregate(std::span<const EvalReport> reports) {
    if (reports.empty()) fail(ErrorCode::empty_input, "aggregate needs at least one report");
    Summary out;
    out.reports = reports.size();
    for (const auto& r : reports) out.bh.insert(out.bh.end(), r.bh.begin(), r.bh.end());
    std::sort(out.bh.begin(), out.bh.end());
    out.bh.erase(std::unique(out.bh.begin(), out.bh.end()), out.bh.end());

    auto summarize = [&](std::size_t mi, int bh, bool cv) {
        SummaryCell sc;
        std::vector<ErrorStats> parts;
        double rmse_sum = 0.0;
        for (const auto& r : reports) {
            const auto pos = std::find(r.bh.begin(), r.bh.end(), bh);
            if (pos == r.bh.end()) continue;
            const auto idx = static_cast<std::size_t>(pos - r.bh.begin());
            const auto& mr = r.measures[mi];
            const Cell& cell = cv ? mr.pooled_cv.at(idx) : mr.model.at(idx);
            if (!cell.ok()) {
                ++sc.failed;
                continue;
            }
            ++sc.subjects;
            rmse_sum += cell.stats->rmse;
            parts.push_back(*cell.stats);
        }
        if (sc.subjects > 0) {
            sc.mean_rmse = rmse_sum / static_cast<double>(sc.subjects);
            sc.pooled = ErrorStats::pool(parts);
        }
        return sc;
    };
    auto overall = [](const std::vector<SummaryCell>& cells) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& c : cells) {
            if (c.subjects == 0) continue;
            sum += c.mean_rmse;
            ++n;
        }
        return n == 0 ? 0.0 : sum / static_cast<double>(n);
    };

    for (std::size_t mi = 0; mi < 3; ++mi) {
        auto& ms = out.measures[mi];
        ms.measure = static_cast<Measure>(mi);
        for (int bh : out.bh) {
            ms.model.push_back(summarize(mi, bh, false));
            ms.cv.push_back(summarize(mi, bh, true));
        }
        ms.overall_model_rmse = overall(ms.model);
        ms.overall_cv_rmse = overall(ms.cv);
    }
    return out;
}

}  // namespace ppgbp
