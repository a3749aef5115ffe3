#include "ppgbp/arx.hpp"
#include "ppgbp/beats.hpp"
#include "ppgbp/error.hpp"
#include "ppgbp/io.hpp"
#include "ppgbp/protocol.hpp"
#include "ppgbp/search.hpp"
#include "ppgbp/signal.hpp"
#include "ppgbp/spline.hpp"
#include "ppgbp/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace ppgbp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    const auto r = a.unchecked<1>();
    std::vector<double> out(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) out[static_cast<std::size_t>(i)] = r(i);
    return out;
}

Array to_array(std::span<const double> v) {
    return Array(static_cast<py::ssize_t>(v.size()), v.data());
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::tuple beats_tuple(const BeatSeries& b) { return py::make_tuple(to_array(b.times()), to_array(b.values())); }

DetectorParams detector(double refractory_s, double prominence) {
    DetectorParams p;
    p.refractory_s = refractory_s;
    p.min_prominence_frac = prominence;
    p.validate();
    return p;
}

SessionRecord make_session(const std::string& subject_id, const Array& bp, const Array& ppg, double fs_hz,
                           const std::vector<std::tuple<std::string, double, double>>& annotations, double start_s) {
    std::vector<IntervalAnnotation> ann;
    for (const auto& [label, s, e] : annotations) ann.push_back({IntervalLabel::parse(label), s, e});
    return SessionRecord(subject_id, UniformSignal(fs_hz, start_s, Unit::mmHg, to_vector(bp)),
                         UniformSignal(fs_hz, start_s, Unit::au, to_vector(ppg)), std::move(ann));
}

py::dict session_dict(const SessionRecord& s) {
    py::dict d;
    d["subject_id"] = s.subject_id();
    d["fs_hz"] = s.bp().fs_hz();
    d["start_s"] = s.bp().start_s();
    d["bp"] = to_array(s.bp().samples());
    d["ppg"] = to_array(s.ppg().samples());
    py::list ann;
    for (const auto& a : s.annotations()) ann.append(py::make_tuple(a.label.str(), a.start_s, a.end_s));
    d["annotations"] = ann;
    return d;
}

ProtocolOptions options(const std::string& selection, std::optional<std::array<int, 3>> max_orders) {
    ProtocolOptions o;
    o.selection = parse_selection(selection);
    if (max_orders) o.grid = {{1, (*max_orders)[0]}, {1, (*max_orders)[1]}, {1, (*max_orders)[2]}};
    return o;
}

}  // namespace

PYBIND11_MODULE(_ppgbp, m) {
    m.doc() = "PPG to blood-pressure ARX reconstruction";

    static PyObject* error_type = PyErr_NewException("ppgbp._ppgbp.Error", PyExc_RuntimeError, nullptr);
    m.attr("Error") = py::reinterpret_borrow<py::object>(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(std::string(e.what()));
            inst.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, inst.ptr());
        }
    });

    py::class_<ArxModel>(m, "ArxModel")
        .def(py::init([](int na, int nb, int nk, std::vector<double> a, std::vector<double> b, double fs_hz) {
                 ArxModel model;
                 model.orders = {na, nb, nk};
                 model.a = std::move(a);
                 model.b = std::move(b);
                 model.fs_hz = fs_hz;
                 model.validate();
                 return model;
             }),
             py::arg("na"), py::arg("nb"), py::arg("nk"), py::arg("a"), py::arg("b"), py::arg("fs_hz") = k_model_fs_hz)
        .def_property_readonly("na", [](const ArxModel& x) { return x.orders.na; })
        .def_property_readonly("nb", [](const ArxModel& x) { return x.orders.nb; })
        .def_property_readonly("nk", [](const ArxModel& x) { return x.orders.nk; })
        .def_readonly("a", &ArxModel::a)
        .def_readonly("b", &ArxModel::b)
        .def_readonly("fs_hz", &ArxModel::fs_hz)
        .def_readonly("fit_mse", &ArxModel::fit_mse)
        .def("dc_gain", [](const ArxModel& x) { return dc_gain(x); })
        .def("is_stable", [](const ArxModel& x) { return is_stable(x); })
        .def("to_text", [](const ArxModel& x) { return model_to_text(x); })
        .def_static("from_text", [](const std::string& t) { return model_from_text(t); })
        .def("__repr__", [](const ArxModel& x) {
            return "ArxModel(na=" + std::to_string(x.orders.na) + ", nb=" + std::to_string(x.orders.nb) +
                   ", nk=" + std::to_string(x.orders.nk) + ")";
        });

    m.def(
        "downsample",
        [](const Array& x, double fs_hz, double target_fs_hz) {
            return to_array(downsample(UniformSignal(fs_hz, 0.0, Unit::au, to_vector(x)), target_fs_hz).samples());
        },
        py::arg("x"), py::arg("fs_hz"), py::arg("target_fs_hz") = k_model_fs_hz);

    m.def(
        "detect_peaks",
        [](const Array& x, double fs_hz, double start_s, double refractory_s, double prominence) {
            return beats_tuple(
                detect_peaks(UniformSignal(fs_hz, start_s, Unit::au, to_vector(x)), detector(refractory_s, prominence)));
        },
        py::arg("x"), py::arg("fs_hz"), py::arg("start_s") = 0.0, py::arg("refractory_s") = 0.33,
        py::arg("prominence") = 0.30, "Peak times and values.");
    m.def(
        "detect_troughs",
        [](const Array& x, double fs_hz, double start_s, double refractory_s, double prominence) {
            return beats_tuple(detect_troughs(UniformSignal(fs_hz, start_s, Unit::au, to_vector(x)),
                                              detector(refractory_s, prominence)));
        },
        py::arg("x"), py::arg("fs_hz"), py::arg("start_s") = 0.0, py::arg("refractory_s") = 0.33,
        py::arg("prominence") = 0.30, "Trough times and values.");

    m.def(
        "spline_on_grid",
        [](const Array& t, const Array& y, double fs_hz, double start_s, double end_s) {
            const auto sp = fit_spline(to_vector(t), to_vector(y));
            return to_array(eval_on_grid(sp, fs_hz, start_s, end_s).samples());
        },
        py::arg("t"), py::arg("y"), py::arg("fs_hz"), py::arg("start_s"), py::arg("end_s"),
        "Not-a-knot cubic spline through (t, y) sampled at start_s + k / fs_hz.");

    m.def(
        "fit_arx",
        [](const Array& y, const Array& u, int na, int nb, int nk, double fs_hz) {
            return fit_arx(UniformSignal(fs_hz, 0.0, Unit::mmHg, to_vector(y)),
                           UniformSignal(fs_hz, 0.0, Unit::au, to_vector(u)), {na, nb, nk});
        },
        py::arg("y"), py::arg("u"), py::arg("na"), py::arg("nb"), py::arg("nk"), py::arg("fs_hz") = k_model_fs_hz);

    m.def(
        "simulate",
        [](const ArxModel& model, const Array& u, const Array& seed) {
            const auto s = to_vector(seed);
            return to_array(simulate(model, UniformSignal(model.fs_hz, 0.0, Unit::au, to_vector(u)), s).samples());
        },
        py::arg("model"), py::arg("u"), py::arg("seed"));

    m.def(
        "search_orders",
        [](const Array& y, const Array& u, int max_na, int max_nb, int max_nk, const std::string& criterion,
           double fs_hz) {
            const auto rep = search_orders(UniformSignal(fs_hz, 0.0, Unit::mmHg, to_vector(y)),
                                           UniformSignal(fs_hz, 0.0, Unit::au, to_vector(u)),
                                           OrderGrid{{1, max_na}, {1, max_nb}, {1, max_nk}}, parse_selection(criterion));
            return py::make_tuple(rep.winner(), json_loads(search_report_to_json(rep)));
        },
        py::arg("y"), py::arg("u"), py::arg("max_na") = 5, py::arg("max_nb") = 5, py::arg("max_nk") = 5,
        py::arg("criterion") = "one_step", py::arg("fs_hz") = k_model_fs_hz,
        "Returns (winning model, report dict).");

    m.def(
        "generate",
        [](std::uint64_t seed, const std::string& preset, std::optional<double> noise_sd) {
            SynthConfig cfg;
            if (preset == "exact") {
                cfg = SynthConfig::exact_closure(seed);
            } else if (preset == "paper-like") {
                cfg = SynthConfig::paper_like(seed);
            } else if (preset == "default") {
                cfg.seed = seed;
            } else {
                throw py::value_error("preset must be default, exact or paper-like");
            }
            if (noise_sd) cfg.noise_sd_mmHg = *noise_sd;
            const auto res = generate(cfg);
            auto d = session_dict(res.session);
            d["truth"] = json_loads(synth_truth_to_json(cfg, res.truth));
            return d;
        },
        py::arg("seed"), py::arg("preset") = "default", py::arg("noise_sd") = py::none(),
        "Synthetic session as a dict with bp, ppg, fs_hz, annotations and truth.");

    m.def(
        "evaluate",
        [](const Array& bp, const Array& ppg, double fs_hz,
           const std::vector<std::tuple<std::string, double, double>>& annotations, const std::string& subject_id,
           const std::string& selection, std::optional<std::array<int, 3>> max_orders, double start_s) {
            const auto session = make_session(subject_id, bp, ppg, fs_hz, annotations, start_s);
            return json_loads(eval_report_to_json(evaluate(session, options(selection, max_orders))));
        },
        py::arg("bp"), py::arg("ppg"), py::arg("fs_hz"), py::arg("annotations"), py::arg("subject_id") = "",
        py::arg("selection") = "free_run", py::arg("max_orders") = py::none(), py::arg("start_s") = 0.0,
        "Model and cross-validation errors as a report dict.");

    m.def(
        "aggregate",
        [](const std::vector<std::string>& report_json) {
            std::vector<EvalReport> reports;
            for (const auto& r : report_json) reports.push_back(eval_report_from_json(r));
            const auto s = aggregate(reports);
            return py::make_tuple(json_loads(summary_to_json(s)), summary_to_table(s));
        },
        py::arg("reports"), "Summary dict and table text from report JSON strings.");

    m.def(
        "report_table",
        [](const std::string& report_json) { return eval_report_to_table(eval_report_from_json(report_json)); },
        py::arg("report_json"));

    m.def("mbp", [](const Array& sbp, const Array& dbp) {
        return to_array(mbp(UniformSignal(k_model_fs_hz, 0.0, Unit::mmHg, to_vector(sbp)),
                            UniformSignal(k_model_fs_hz, 0.0, Unit::mmHg, to_vector(dbp)))
                            .samples());
    });
}
