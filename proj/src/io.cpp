#include "ppgbp/io.hpp"

#include "ppgbp/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace ppgbp {

using json = nlohmann::ordered_json;

namespace {

struct Line {
    std::size_t number;  // 1-based
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t pos = 0, number = 1;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back({number++, line});
        pos = end + 1;
    }
    while (!out.empty() && out.back().text.empty()) out.pop_back();
    return out;
}

struct Field {
    std::size_t column;  // 1-based
    std::string_view text;
};

std::vector<Field> split_fields(std::string_view line, char sep = ',') {
    std::vector<Field> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = line.find(sep, pos);
        if (end == std::string_view::npos) end = line.size();
        out.push_back({pos + 1, line.substr(pos, end - pos)});
        if (end == line.size()) break;
        pos = end + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
    fail(ErrorCode::parse_error, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

double parse_double(const Field& f, std::size_t line) {
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || f.text.empty()) {
        parse_fail(line, f.column, "'" + std::string(f.text) + "' is not a number");
    }
    if (!std::isfinite(v)) parse_fail(line, f.column, "non-finite value '" + std::string(f.text) + "'");
    return v;
}

int parse_int(std::string_view text, const std::string& what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(ErrorCode::parse_error, what + ": '" + std::string(text) + "' is not an integer");
    }
    return v;
}

double parse_plain_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
        fail(ErrorCode::parse_error, what + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

json stats_json(const ErrorStats& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"rmse", s.rmse}};
}

ErrorStats stats_from_json(const json& j) {
    return {j.at("n").get<std::size_t>(), j.at("mean").get<double>(), j.at("std").get<double>(),
            j.at("rmse").get<double>()};
}

json cell_json(const Cell& c) {
    if (c.ok()) return stats_json(*c.stats);
    return {{"error", std::string(to_string(*c.error))}, {"message", c.message}};
}

Cell cell_from_json(const json& j) {
    Cell c;
    if (j.contains("error")) {
        c.error = parse_error_code(j.at("error").get<std::string>());
        c.message = j.value("message", "");
    } else {
        c.stats = stats_from_json(j);
    }
    return c;
}

json model_json(const ArxModel& m) {
    return {{"na", m.orders.na}, {"nb", m.orders.nb}, {"nk", m.orders.nk}, {"fs_hz", m.fs_hz},
            {"a", m.a},          {"b", m.b},          {"fit_mse", m.fit_mse}};
}

ArxModel model_from_json(const json& j) {
    ArxModel m;
    m.orders = {j.at("na").get<int>(), j.at("nb").get<int>(), j.at("nk").get<int>()};
    m.fs_hz = j.at("fs_hz").get<double>();
    m.a = j.at("a").get<std::vector<double>>();
    m.b = j.at("b").get<std::vector<double>>();
    m.fit_mse = j.at("fit_mse").get<double>();
    m.validate();
    return m;
}

json summary_cell_json(const SummaryCell& c) {
    json j{{"subjects", c.subjects}, {"failed", c.failed}};
    j["mean_rmse"] = c.subjects > 0 ? json(c.mean_rmse) : json(nullptr);
    j["pooled"] = c.pooled ? stats_json(*c.pooled) : json(nullptr);
    return j;
}

std::string pad(const std::string& s, std::size_t width) {
    // Width counts code points so "±" and "—" line up.
    std::size_t cps = 0;
    for (unsigned char ch : s) {
        if ((ch & 0xC0) != 0x80) ++cps;
    }
    return cps >= width ? s : std::string(width - cps, ' ') + s;
}

struct TableBuilder {
    std::vector<std::string> footnotes;

    std::string failed(const Cell& c, const std::string& where) {
        footnotes.push_back(where + ": " + std::string(to_string(*c.error)) + " (" + c.message + ")");
        return "—[" + std::to_string(footnotes.size()) + "]";
    }
};

const char* measure_title(Measure m) {
    switch (m) {
        case Measure::sbp: return "Systolic";
        case Measure::dbp: return "Diastolic";
        case Measure::mbp: return "Mean";
    }
    return "";
}

}  // namespace

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::io_error, "cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(ErrorCode::io_error, "write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::io_error, "cannot rename onto '" + path.string() + "'");
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, ptr};
}

std::string format_sample(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return {buf, ptr};
}

std::string signals_to_text(const SessionRecord& session) {
    const auto& id = session.subject_id();
    if (id.find_first_of(",\n\r=") != std::string::npos) {
        fail(ErrorCode::invalid_argument, "subject id must not contain ',', '=' or line breaks");
    }
    std::string out = "fs_hz=" + format_double(session.bp().fs_hz()) + ",unit_bp=mmHg,unit_ppg=au,start_s=" +
                      format_double(session.bp().start_s());
    if (!id.empty()) out += ",subject_id=" + id;
    out += '\n';
    const auto bp = session.bp().samples();
    const auto ppg = session.ppg().samples();
    out.reserve(out.size() + bp.size() * 24);
    for (std::size_t k = 0; k < bp.size(); ++k) {
        out += format_sample(bp[k]);
        out += ',';
        out += format_sample(ppg[k]);
        out += '\n';
    }
    return out;
}

SignalPair signals_from_text(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) parse_fail(1, 1, "empty signals file");

    std::map<std::string, std::string, std::less<>> header;
    for (const auto& f : split_fields(lines[0].text)) {
        const auto eq = f.text.find('=');
        if (eq == std::string_view::npos) parse_fail(1, f.column, "header field without '='");
        const std::string key(f.text.substr(0, eq));
        if (key != "fs_hz" && key != "unit_bp" && key != "unit_ppg" && key != "start_s" && key != "subject_id") {
            parse_fail(1, f.column, "unknown header key '" + key + "'");
        }
        header[key] = std::string(f.text.substr(eq + 1));
    }
    for (const char* key : {"fs_hz", "unit_bp", "unit_ppg", "start_s"}) {
        if (!header.count(key)) parse_fail(1, 1, std::string("header lacks '") + key + "'");
    }
    const double fs = parse_double({1, header["fs_hz"]}, 1);
    const double start = parse_double({1, header["start_s"]}, 1);
    if (parse_unit(header["unit_bp"]) != Unit::mmHg) fail(ErrorCode::unit_mismatch, "BP channel must be mmHg");
    if (parse_unit(header["unit_ppg"]) != Unit::au) fail(ErrorCode::unit_mismatch, "PPG channel must be au");
    if (!(fs > 0.0)) parse_fail(1, 1, "fs_hz must be positive");

    std::vector<double> bp, ppg;
    bp.reserve(lines.size());
    ppg.reserve(lines.size());
    std::size_t width = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (width == 0) width = fields.size();
        if (fields.size() != width || (width != 2 && width != 3)) {
            parse_fail(line.number, 1, "expected " + std::to_string(width == 3 ? 3 : 2) + " comma-separated values");
        }
        if (width == 3) {
            const double t = parse_double(fields[0], line.number);
            const double expected = start + static_cast<double>(bp.size()) / fs;
            if (std::abs(t - expected) > 0.01 / fs + 1e-9 * std::abs(expected)) {
                fail(ErrorCode::rate_mismatch, "line " + std::to_string(line.number) + ": time " + format_double(t) +
                                                   " disagrees with fs_hz (expected " + format_double(expected) + ")");
            }
        }
        bp.push_back(parse_double(fields[width - 2], line.number));
        ppg.push_back(parse_double(fields[width - 1], line.number));
    }
    std::string id = header.count("subject_id") ? header["subject_id"] : std::string();
    return {std::move(id), UniformSignal(fs, start, Unit::mmHg, std::move(bp)),
            UniformSignal(fs, start, Unit::au, std::move(ppg))};
}

std::string annotations_to_text(const std::vector<IntervalAnnotation>& annotations) {
    std::string out = "label,start_s,end_s\n";
    for (const auto& a : annotations) {
        out += a.label.str() + "," + format_double(a.start_s) + "," + format_double(a.end_s) + "\n";
    }
    return out;
}

std::vector<IntervalAnnotation> annotations_from_text(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0].text != "label,start_s,end_s") {
        parse_fail(1, 1, "annotations header must be 'label,start_s,end_s'");
    }
    std::vector<IntervalAnnotation> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 3) parse_fail(line.number, 1, "expected label,start_s,end_s");
        IntervalAnnotation a;
        try {
            a.label = IntervalLabel::parse(fields[0].text);
        } catch (const Error& e) {
            parse_fail(line.number, fields[0].column, e.what());
        }
        a.start_s = parse_double(fields[1], line.number);
        a.end_s = parse_double(fields[2], line.number);
        out.push_back(a);
    }
    return out;
}

void write_session(const SessionFileSet& files, const SessionRecord& session) {
    atomic_write(files.signals, signals_to_text(session));
    atomic_write(files.annotations, annotations_to_text(session.annotations()));
}

SessionRecord read_session(const SessionFileSet& files) {
    auto signals = signals_from_text(read_text(files.signals));
    auto annotations = annotations_from_text(read_text(files.annotations));
    return SessionRecord(std::move(signals.subject_id), std::move(signals.bp), std::move(signals.ppg),
                         std::move(annotations));
}

std::string model_to_text(const ArxModel& model) {
    model.validate();
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    return "na=" + std::to_string(model.orders.na) + "\nnb=" + std::to_string(model.orders.nb) +
           "\nnk=" + std::to_string(model.orders.nk) + "\nfs_hz=" + format_double(model.fs_hz) + "\na=" +
           list(model.a) + "\nb=" + list(model.b) + "\nfit_mse=" + format_double(model.fit_mse) + "\n";
}

ArxModel model_from_text(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    for (const auto& line : split_lines(text)) {
        if (line.text.empty()) continue;
        const auto eq = line.text.find('=');
        if (eq == std::string_view::npos) parse_fail(line.number, 1, "expected key=value");
        kv[std::string(line.text.substr(0, eq))] = std::string(line.text.substr(eq + 1));
    }
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) fail(ErrorCode::parse_error, std::string("model file lacks '") + key + "'");
        return it->second;
    };
    auto list = [&](const char* key) {
        std::vector<double> v;
        for (const auto& f : split_fields(get(key))) v.push_back(parse_plain_double(f.text, key));
        return v;
    };
    ArxModel m;
    m.orders = {parse_int(get("na"), "na"), parse_int(get("nb"), "nb"), parse_int(get("nk"), "nk")};
    m.fs_hz = parse_plain_double(get("fs_hz"), "fs_hz");
    m.a = list("a");
    m.b = list("b");
    m.fit_mse = parse_plain_double(get("fit_mse"), "fit_mse");
    try {
        m.validate();
    } catch (const Error& e) {
        fail(ErrorCode::parse_error, std::string("inconsistent model file: ") + e.what());
    }
    return m;
}

void write_model(const std::filesystem::path& path, const ArxModel& model) {
    atomic_write(path, model_to_text(model));
}

ArxModel read_model(const std::filesystem::path& path) {
    return model_from_text(read_text(path));
}

std::string beats_to_text(const std::vector<std::pair<std::string, BeatSeries>>& series) {
    std::string out = "series,t_s,value\n";
    for (const auto& [name, beats] : series) {
        for (const auto& p : beats.points) out += name + "," + format_double(p.t_s) + "," + format_double(p.value) + "\n";
    }
    return out;
}

std::string search_report_to_json(const SearchReport& report) {
    json j;
    j["criterion"] = std::string(to_string(report.criterion));
    j["winner"] = model_json(report.winner());
    json cands = json::array();
    for (const auto& c : report.candidates) {
        json cj{{"na", c.orders.na}, {"nb", c.orders.nb}, {"nk", c.orders.nk}};
        if (c.ok()) {
            cj["status"] = "ok";
            cj["fit_mse"] = c.model->fit_mse;
            cj["score"] = std::isfinite(c.score) ? json(c.score) : json(nullptr);
        } else {
            cj["status"] = std::string(to_string(*c.error));
            cj["message"] = c.message;
        }
        cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    return j.dump(2) + "\n";
}

std::string eval_report_to_json(const EvalReport& r) {
    json j;
    j["subject_id"] = r.subject_id;
    j["selection"] = std::string(to_string(r.selection));
    j["partial"] = r.partial;
    j["bh"] = r.bh;
    json models = json::array();
    for (const auto& m : r.models) {
        json mj{{"bh", m.bh}, {"channel", std::string(to_string(m.channel))}};
        if (m.model) {
            mj["model"] = model_json(*m.model);
        } else {
            mj["error"] = std::string(to_string(*m.error));
            mj["message"] = m.message;
        }
        models.push_back(std::move(mj));
    }
    j["models"] = std::move(models);
    json measures = json::object();
    for (const auto& mr : r.measures) {
        json mj;
        json model = json::array(), pairs = json::array(), pooled = json::array();
        for (const auto& c : mr.model) model.push_back(cell_json(c));
        for (const auto& p : mr.pairs) {
            pairs.push_back({{"model_bh", p.model_bh}, {"target_bh", p.target_bh}, {"cell", cell_json(p.cell)}});
        }
        for (const auto& c : mr.pooled_cv) pooled.push_back(cell_json(c));
        mj["model"] = std::move(model);
        mj["pairs"] = std::move(pairs);
        mj["pooled_cv"] = std::move(pooled);
        measures[std::string(to_string(mr.measure))] = std::move(mj);
    }
    j["measures"] = std::move(measures);
    return j.dump(2) + "\n";
}

EvalReport eval_report_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        EvalReport r;
        r.subject_id = j.at("subject_id").get<std::string>();
        r.selection = parse_selection(j.at("selection").get<std::string>());
        r.partial = j.at("partial").get<bool>();
        r.bh = j.at("bh").get<std::vector<int>>();
        for (const auto& mj : j.at("models")) {
            ModelEntry m;
            m.bh = mj.at("bh").get<int>();
            m.channel = parse_channel(mj.at("channel").get<std::string>());
            if (mj.contains("model")) {
                m.model = model_from_json(mj.at("model"));
            } else {
                m.error = parse_error_code(mj.at("error").get<std::string>());
                m.message = mj.value("message", "");
            }
            r.models.push_back(std::move(m));
        }
        for (std::size_t mi = 0; mi < 3; ++mi) {
            auto& mr = r.measures[mi];
            mr.measure = static_cast<Measure>(mi);
            const auto& mj = j.at("measures").at(std::string(to_string(mr.measure)));
            for (const auto& c : mj.at("model")) mr.model.push_back(cell_from_json(c));
            for (const auto& p : mj.at("pairs")) {
                mr.pairs.push_back({p.at("model_bh").get<int>(), p.at("target_bh").get<int>(), cell_from_json(p.at("cell"))});
            }
            for (const auto& c : mj.at("pooled_cv")) mr.pooled_cv.push_back(cell_from_json(c));
            if (mr.model.size() != r.bh.size() || mr.pooled_cv.size() != r.bh.size()) {
                fail(ErrorCode::parse_error, "report cell counts do not match its BH list");
            }
        }
        return r;
    } catch (const json::exception& e) {
        fail(ErrorCode::parse_error, std::string("malformed report JSON: ") + e.what());
    }
}

std::string summary_to_json(const Summary& s) {
    json j;
    j["reports"] = s.reports;
    j["bh"] = s.bh;
    json measures = json::object();
    for (const auto& ms : s.measures) {
        json mj;
        json model = json::array(), cv = json::array();
        for (const auto& c : ms.model) model.push_back(summary_cell_json(c));
        for (const auto& c : ms.cv) cv.push_back(summary_cell_json(c));
        mj["model"] = std::move(model);
        mj["cv"] = std::move(cv);
        mj["overall_model_rmse"] = ms.overall_model_rmse;
        mj["overall_cv_rmse"] = ms.overall_cv_rmse;
        measures[std::string(to_string(ms.measure))] = std::move(mj);
    }
    j["measures"] = std::move(measures);
    return j.dump(2) + "\n";
}

std::string synth_truth_to_json(const SynthConfig& config, const GroundTruth& truth) {
    json j;
    j["seed"] = config.seed;
    j["subject_id"] = config.subject_id;
    j["noise_sd_mmHg"] = config.noise_sd_mmHg;
    j["shared_model"] = config.shared_model;
    j["bh_durations_s"] = truth.bh_durations_s;
    json sbp = json::array(), dbp = json::array();
    for (const auto& m : truth.sbp_models) sbp.push_back(model_json(m));
    for (const auto& m : truth.dbp_models) dbp.push_back(model_json(m));
    j["sbp_models"] = std::move(sbp);
    j["dbp_models"] = std::move(dbp);
    j["beats"] = {{"sbp", truth.sbp_t.size()}, {"dbp", truth.dbp_t.size()},
                  {"ppg_peak", truth.ppg_peak_t.size()}, {"ppg_trough", truth.ppg_trough_t.size()}};
    auto noise = [](const NoiseSummary& n) { return json{{"n", n.n}, {"mean", n.mean}, {"sd", n.sd}}; };
    j["noise"] = {{"sbp", noise(truth.sbp_noise)}, {"dbp", noise(truth.dbp_noise)}};
    return j.dump(2) + "\n";
}

std::string format_mean_std(double mean, double std) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, std);
    return buf;
}

std::string format_rmse(double rmse) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", rmse);
    return buf;
}

std::string eval_report_to_table(const EvalReport& r) {
    TableBuilder tb;
    std::ostringstream out;
    const std::size_t w = 16;
    auto header = [&](const std::string& title) {
        out << title << "\n" << std::string(10, ' ');
        for (int k : r.bh) out << pad("BH" + std::to_string(k), w);
        out << "\n";
    };
    auto block = [&](const std::string& title, bool cv, bool rmse) {
        header(title);
        for (const auto& mr : r.measures) {
            out << measure_title(mr.measure) << std::string(10 - std::string(measure_title(mr.measure)).size(), ' ');
            for (std::size_t i = 0; i < r.bh.size(); ++i) {
                const Cell& c = cv ? mr.pooled_cv[i] : mr.model[i];
                std::string text;
                if (!c.ok()) {
                    text = tb.failed(c, std::string(measure_title(mr.measure)) + " BH" + std::to_string(r.bh[i]));
                } else {
                    text = rmse ? format_rmse(c.stats->rmse) : format_mean_std(c.stats->mean, c.stats->std);
                }
                out << pad(text, w);
            }
            out << "\n";
        }
        out << "\n";
    };
    out << "Subject " << r.subject_id << " (selection: " << to_string(r.selection) << ")\n\n";
    block("Model errors, mean ± std (mmHg)", false, false);
    block("Cross-validation errors, mean ± std (mmHg)", true, false);
    block("Model errors, rMSE (mmHg)", false, true);
    block("Cross-validation errors, rMSE (mmHg)", true, true);
    for (std::size_t i = 0; i < tb.footnotes.size(); ++i) out << "[" << i + 1 << "] " << tb.footnotes[i] << "\n";
    return out.str();
}

std::string summary_to_table(const Summary& s) {
    std::ostringstream out;
    const std::size_t w = 16;
    std::vector<std::string> notes;
    auto block = [&](const std::string& title, bool cv, bool rmse) {
        out << title << "\n" << std::string(10, ' ');
        for (int k : s.bh) out << pad("BH" + std::to_string(k), w);
        out << "\n";
        for (const auto& ms : s.measures) {
            const std::string name = measure_title(ms.measure);
            out << name << std::string(10 - name.size(), ' ');
            const auto& cells = cv ? ms.cv : ms.model;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const auto& c = cells[i];
                std::string text;
                if (c.subjects == 0) {
                    notes.push_back(name + " BH" + std::to_string(s.bh[i]) + ": no successful subject (" +
                                    std::to_string(c.failed) + " failed)");
                    text = "—[" + std::to_string(notes.size()) + "]";
                } else {
                    text = rmse ? format_rmse(c.mean_rmse) : format_mean_std(c.pooled->mean, c.pooled->std);
                }
                out << pad(text, w);
            }
            if (rmse) out << pad(format_rmse(cv ? ms.overall_cv_rmse : ms.overall_model_rmse), w) << "  (mean)";
            out << "\n";
        }
        out << "\n";
    };
    out << "Subjects: " << s.reports << "\n\n";
    block("Model errors, pooled mean ± std (mmHg)", false, false);
    block("Cross-validation errors, pooled mean ± std (mmHg)", true, false);
    block("Model errors, rMSE averaged over subjects (mmHg)", false, true);
    block("Cross-validation errors, rMSE averaged over subjects (mmHg)", true, true);
    for (std::size_t i = 0; i < notes.size(); ++i) out << "[" << i + 1 << "] " << notes[i] << "\n";
    return out.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path) {
    atomic_write(json_path, eval_report_to_json(report));
    if (!table_path.empty()) atomic_write(table_path, eval_report_to_table(report));
}

void write_report(const Summary& summary, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path) {
    atomic_write(json_path, summary_to_json(summary));
    if (!table_path.empty()) atomic_write(table_path, summary_to_table(summary));
}

std::string traces_to_csv(const std::vector<Trace>& traces) {
    std::string out = "model_bh,target_bh,measure,t_s,measured,estimated\n";
    for (const auto& tr : traces) {
        const std::string prefix =
            std::to_string(tr.model_bh) + "," + std::to_string(tr.target_bh) + "," + std::string(to_string(tr.measure)) + ",";
        for (std::size_t k = 0; k < tr.data.errors.size(); ++k) {
            const double t = tr.start_s + static_cast<double>(k) / k_model_fs_hz;
            out += prefix + format_double(t) + "," + format_double(tr.data.measured[k]) + "," +
                   format_double(tr.data.estimated[k]) + "\n";
        }
    }
    return out;
}

}  // namespace ppgbp
