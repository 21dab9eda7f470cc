// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "pcxai/classifier.hpp"
#include "pcxai/clustering.hpp"
#include "pcxai/error.hpp"
#include "pcxai/external_classifier.hpp"
#include "pcxai/io.hpp"
#include "pcxai/perturb.hpp"
#include "pcxai/saliency.hpp"
#include "pcxai/synthetic.hpp"

namespace py = pybind11;
using namespace pcxai;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud cloud_from_array(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw ValidationError("points must have shape (N, 3)");
  std::vector<Point3> pts(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1), r(i, 2)};
  return PointCloud(std::move(pts));
}

Array cloud_to_array(const PointCloud& cloud) {
  Array out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t{3}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto s = static_cast<py::ssize_t>(i);
    w(s, 0) = cloud[i].x;
    w(s, 1) = cloud[i].y;
    w(s, 2) = cloud[i].z;
  }
  return out;
}

std::vector<Point3> points_of(const Array& a) {
  const PointCloud c = cloud_from_array(a);
  return {c.begin(), c.end()};
}

py::array_t<int> int_array(std::span<const int> v) {
  py::array_t<int> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Classifier backed by a Python callable taking an (N, 3) array and
// returning one score per class.
class CallbackClassifier final : public Classifier {
 public:
  CallbackClassifier(py::function fn, int classes) : fn_(std::move(fn)), classes_(classes) {
    if (classes < 2) throw ValidationError("a classifier needs at least 2 classes");
  }
  ~CallbackClassifier() override {
    py::gil_scoped_acquire gil;
    fn_ = py::function();
  }

  ScoreVector predict(const PointCloud& cloud) const override {
    py::gil_scoped_acquire gil;
    auto scores = fn_(cloud_to_array(cloud)).cast<std::vector<double>>();
    if (scores.size() != static_cast<std::size_t>(classes_)) {
      throw ValidationError("callback returned " + std::to_string(scores.size()) + " scores, expected " +
                            std::to_string(classes_));
    }
    return ScoreVector(std::move(scores));
  }
  int class_count() const override { return classes_; }
  bool concurrent() const override { return false; }

 private:
  py::function fn_;
  int classes_;
};

LabelingSource make_source(const std::optional<SegmentLabeling>& labels, bool refine, double eps_frac,
                           int min_pts, std::optional<int> clusters) {
  if (clusters) {
    if (labels) throw ValidationError("labels and clusters are mutually exclusive");
    return BaselineKmeans{*clusters};
  }
  if (!labels) throw ValidationError("explain needs labels or clusters");
  if (refine) return Refined{*labels, eps_frac, min_pts};
  return LabelFile{*labels};
}

}  // namespace

PYBIND11_MODULE(_pcxai, m) {
  m.doc() = "Segment-level saliency maps for point-cloud classifiers";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<EmptySegment>(m, "EmptySegment", error.ptr());
  py::register_exception<EmptyRetainedSet>(m, "EmptyRetainedSet", error.ptr());
  auto protocol = py::register_exception<ProtocolError>(m, "ProtocolError", error.ptr());
  py::register_exception<SpawnError>(m, "SpawnError", protocol.ptr());

  py::enum_<Mechanism>(m, "Mechanism")
      .value("ABSENCE", Mechanism::Absence)
      .value("PRESENCE", Mechanism::Presence);
  py::enum_<DestinationPolicy>(m, "DestinationPolicy")
      .value("RANDOM_RETAINED", DestinationPolicy::RandomRetained)
      .value("CENTROID", DestinationPolicy::Centroid);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init(&cloud_from_array), py::arg("points"))
      .def("__len__", &PointCloud::size)
      .def_property_readonly("points", &cloud_to_array)
      .def("bounding_diagonal", &PointCloud::bounding_diagonal)
      .def("centroid", [](const PointCloud& c) {
        const auto p = c.centroid();
        return py::make_tuple(p.x, p.y, p.z);
      })
      .def("__eq__", [](const PointCloud& a, const PointCloud& b) { return a == b; });

  py::class_<SegmentLabeling>(m, "SegmentLabeling")
      .def(py::init<std::vector<int>, std::map<int, std::string>>(), py::arg("labels"),
           py::arg("names") = std::map<int, std::string>{})
      .def("__len__", &SegmentLabeling::size)
      .def_property_readonly("labels", [](const SegmentLabeling& l) { return int_array(l.labels()); })
      .def_property_readonly("names", &SegmentLabeling::names)
      .def_property_readonly("segment_ids", &SegmentLabeling::segment_ids)
      .def("part_name", &SegmentLabeling::part_name)
      .def("__eq__", [](const SegmentLabeling& a, const SegmentLabeling& b) { return a == b; });

  py::class_<SaliencyMap>(m, "SaliencyMap")
      .def_property_readonly("mechanism", &SaliencyMap::mechanism)
      .def_property_readonly("target_class", &SaliencyMap::target_class)
      .def_property_readonly("per_segment", &SaliencyMap::per_segment)
      .def_property_readonly("per_point", [](const SaliencyMap& s) {
        return py::array_t<double>(static_cast<py::ssize_t>(s.per_point().size()), s.per_point().data());
      })
      .def_property_readonly("errors", &SaliencyMap::errors)
      .def("top_segment", &SaliencyMap::top_segment);

  m.def("read_points", &read_points, py::arg("path"));
  m.def("parse_points", [](const std::string& text) { return parse_points(text); }, py::arg("text"));
  m.def("write_points", &write_points, py::arg("cloud"), py::arg("path"));
  m.def("read_labels", &read_labels, py::arg("path"), py::arg("cloud"));
  m.def("write_labels", &write_labels, py::arg("labeling"), py::arg("path"));
  m.def("saliency_color", &saliency_color, py::arg("value"), py::arg("lo"), py::arg("hi"));
  m.def("write_colored_ply",
        py::overload_cast<const PointCloud&, const SaliencyMap&, const std::filesystem::path&>(&write_colored_ply),
        py::arg("cloud"), py::arg("map"), py::arg("path"));
  m.def("write_saliency_csv",
        py::overload_cast<const SaliencyMap&, const SegmentLabeling&, const std::filesystem::path&>(
            &write_saliency_csv),
        py::arg("map"), py::arg("labeling"), py::arg("path"));
  m.def("saliency_csv", [](const SaliencyMap& map, const SegmentLabeling& labeling) {
    std::ostringstream out;
    write_saliency_csv(map, labeling, out);
    return out.str();
  });

  m.def("dbscan", [](const Array& pts, double eps, int min_pts) {
    const auto a = dbscan(points_of(pts), {eps, min_pts});
    return py::make_tuple(int_array(a.ids), a.cluster_count);
  }, py::arg("points"), py::arg("eps"), py::arg("min_pts") = 4);
  m.def("kmeans", [](const Array& pts, int k, std::uint64_t seed, int max_iters, double tol) {
    const auto r = kmeans(points_of(pts), {k, max_iters, tol, seed});
    py::list centroids;
    for (const auto& c : r.centroids) centroids.append(py::make_tuple(c.x, c.y, c.z));
    py::dict out;
    out["ids"] = int_array(r.assignment.ids);
    out["centroids"] = centroids;
    out["inertia_history"] = r.inertia_history;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
  }, py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 100, py::arg("tol") = 1e-9);
  m.def("refine_segments", [](const PointCloud& cloud, const SegmentLabeling& labeling, double eps_frac,
                              int min_pts, std::uint64_t seed) {
    return refine_segments(cloud, labeling, {eps_frac, min_pts, seed});
  }, py::arg("cloud"), py::arg("labeling"), py::arg("eps_frac") = 0.15, py::arg("min_pts") = 4,
        py::arg("seed") = 0);
  m.def("baseline_clusters", [](const PointCloud& cloud, const std::vector<int>& ks, std::uint64_t seed) {
    return baseline_clusters(cloud, ks, seed);
  }, py::arg("cloud"), py::arg("k_list"), py::arg("seed") = 0);

  py::class_<Classifier, std::shared_ptr<Classifier>>(m, "Classifier")
      .def("predict", [](const Classifier& c, const PointCloud& cloud) {
        const auto s = c.predict(cloud);
        return std::vector<double>(s.values().begin(), s.values().end());
      })
      .def_property_readonly("class_count", &Classifier::class_count);
  py::class_<BuiltinClassifier, Classifier, std::shared_ptr<BuiltinClassifier>>(m, "BuiltinClassifier")
      .def_property_readonly("model", &BuiltinClassifier::model);
  py::class_<CallbackClassifier, Classifier, std::shared_ptr<CallbackClassifier>>(m, "CallbackClassifier")
      .def(py::init<py::function, int>(), py::arg("fn"), py::arg("classes"));

  py::class_<BuiltinModel>(m, "BuiltinModel")
      .def_static("untrained", &BuiltinModel::untrained, py::arg("classes"), py::arg("features") = 256,
                  py::arg("seed") = 0)
      .def_static("load", &BuiltinModel::load, py::arg("path"))
      .def_static("parse", [](const std::string& text) { return BuiltinModel::parse(text); })
      .def("save", &BuiltinModel::save, py::arg("path"))
      .def("serialize", &BuiltinModel::serialize)
      .def_property_readonly("class_count", &BuiltinModel::class_count)
      .def_property_readonly("feature_dim", &BuiltinModel::feature_dim)
      .def_property_readonly("feature_seed", &BuiltinModel::feature_seed)
      .def("pool", [](const BuiltinModel& mdl, const PointCloud& c) { return mdl.features().pool(c); })
      .def("predict", [](const BuiltinModel& mdl, const PointCloud& c) {
        const auto s = mdl.predict(c);
        return std::vector<double>(s.values().begin(), s.values().end());
      })
      .def("classifier", [](const BuiltinModel& mdl) {
        return std::shared_ptr<Classifier>(std::make_shared<BuiltinClassifier>(mdl));
      });

  m.def("train_builtin", [](const std::vector<std::pair<PointCloud, int>>& data, double lr, int epochs,
                            std::uint64_t seed, int features) {
    std::vector<TrainSample> samples;
    for (const auto& [c, label] : data) samples.push_back({c, label});
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.feature_dim = features;
    py::gil_scoped_release release;
    auto r = train_builtin(samples, cfg);
    return std::make_pair(std::move(r.model), r.accuracy);
  }, py::arg("samples"), py::arg("lr") = 0.5, py::arg("epochs") = 1000, py::arg("seed") = 0,
        py::arg("features") = 256);

  m.def("open_classifier", [](const std::string& spec, int expected) {
    return std::const_pointer_cast<Classifier>(open_classifier(spec, expected));
  }, py::arg("spec"), py::arg("expected_classes") = 0);

  m.def("select_destination", [](const PointCloud& cloud, const std::vector<std::size_t>& retained,
                                 DestinationPolicy policy, std::uint64_t seed) {
    const auto p = select_destination(cloud, retained, policy, seed);
    return py::make_tuple(p.x, p.y, p.z);
  });
  m.def("shift_segment", [](const PointCloud& cloud, const SegmentLabeling& labeling, Mechanism mech,
                            int segment, DestinationPolicy policy, std::uint64_t seed) {
    return shift_segment(cloud, labeling, {mech, segment, policy, seed});
  }, py::arg("cloud"), py::arg("labeling"), py::arg("mechanism"), py::arg("segment"),
        py::arg("destination") = DestinationPolicy::RandomRetained, py::arg("seed") = 0);
  m.def("noise_bound", &noise_bound, py::arg("cloud"), py::arg("percent"));
  m.def("add_noise", [](const PointCloud& cloud, double percent, std::uint64_t seed) {
    return add_noise(cloud, {percent, seed});
  }, py::arg("cloud"), py::arg("percent"), py::arg("seed") = 0);

  m.def("attribution_absence", &attribution_absence);
  m.def("attribution_presence", &attribution_presence);
  m.def("spearman", [](const std::vector<double>& a, const std::vector<double>& b) { return spearman(a, b); });

  py::class_<Explanation>(m, "Explanation")
      .def_readonly("map", &Explanation::map)
      .def_readonly("labeling", &Explanation::labeling)
      .def_property_readonly("original_scores", [](const Explanation& e) {
        return std::vector<double>(e.original_scores.values().begin(), e.original_scores.values().end());
      });

  m.def("explain", [](const PointCloud& cloud, std::shared_ptr<Classifier> classifier,
                      std::optional<SegmentLabeling> labels, Mechanism mechanism, DestinationPolicy destination,
                      std::optional<int> target, std::uint64_t seed, int jobs, bool refine, double eps_frac,
                      int min_pts, std::optional<int> clusters) {
    ExplainRequest req{.cloud = cloud,
                       .source = make_source(labels, refine, eps_frac, min_pts, clusters),
                       .mechanism = mechanism,
                       .destination = destination,
                       .target = target,
                       .classifier = std::move(classifier),
                       .seed = seed,
                       .jobs = jobs};
    py::gil_scoped_release release;
    return explain(req);
  }, py::arg("cloud"), py::arg("classifier"), py::arg("labels") = std::nullopt,
        py::arg("mechanism") = Mechanism::Absence, py::arg("destination") = DestinationPolicy::RandomRetained,
        py::arg("target") = std::nullopt, py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("refine") = false,
        py::arg("eps_frac") = 0.15, py::arg("min_pts") = 4, py::arg("clusters") = std::nullopt);

  py::class_<SweepReport>(m, "SweepReport")
      .def_property_readonly("configs", [](const SweepReport& r) {
        std::vector<std::string> out;
        for (const auto& e : r.entries) out.push_back(e.config);
        return out;
      })
      .def_property_readonly("explanations", [](const SweepReport& r) {
        std::vector<Explanation> out;
        for (const auto& e : r.entries) out.push_back(e.explanation);
        return out;
      })
      .def_property_readonly("comparisons", [](const SweepReport& r) {
        py::list out;
        for (const auto& c : r.comparisons) {
          py::dict d;
          d["first"] = c.first;
          d["second"] = c.second;
          d["matched"] = c.matched;
          d["rank_correlation"] = c.rank_correlation;
          d["max_abs_delta"] = c.max_abs_delta;
          d["top1_agree"] = c.top1_agree;
          out.append(d);
        }
        return out;
      })
      .def("to_csv", &SweepReport::to_csv)
      .def("summary", &SweepReport::summary);

  m.def("sweep_baseline", [](const PointCloud& cloud, const std::vector<int>& ks, Mechanism mech,
                             std::shared_ptr<Classifier> classifier, std::uint64_t seed, int jobs) {
    py::gil_scoped_release release;
    return sweep_baseline(cloud, ks, mech, classifier, seed, {.jobs = jobs});
  }, py::arg("cloud"), py::arg("k_list"), py::arg("mechanism"), py::arg("classifier"), py::arg("seed") = 0,
        py::arg("jobs") = 1);
  m.def("sweep_noise", [](const PointCloud& cloud, const SegmentLabeling& labeling,
                          const std::vector<double>& percents, Mechanism mech,
                          std::shared_ptr<Classifier> classifier, std::uint64_t seed, int jobs) {
    py::gil_scoped_release release;
    return sweep_noise(cloud, labeling, percents, mech, classifier, seed, {.jobs = jobs});
  }, py::arg("cloud"), py::arg("labeling"), py::arg("percents"), py::arg("mechanism"), py::arg("classifier"),
        py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def("destination_invariance_check", [](const PointCloud& cloud, const SegmentLabeling& labeling, int segment,
                                           const Classifier& classifier, int trials, std::uint64_t seed,
                                           Mechanism mech) {
    InvarianceResult r;
    {
      py::gil_scoped_release release;
      r = destination_invariance_check(cloud, labeling, segment, classifier, trials, seed, mech);
    }
    return py::make_tuple(r.equal, r.max_deviation);
  }, py::arg("cloud"), py::arg("labeling"), py::arg("segment"), py::arg("classifier"), py::arg("trials") = 10,
        py::arg("seed") = 0, py::arg("mechanism") = Mechanism::Absence);

  auto syn = m.def_submodule("synthetic", "Seeded synthetic clouds");
  syn.def("shape_suite", [](int per_class, int points, std::uint64_t seed) {
    std::vector<std::pair<PointCloud, int>> out;
    for (auto& s : synthetic::shape_suite(per_class, points, seed)) out.emplace_back(std::move(s.cloud), s.label);
    return out;
  }, py::arg("per_class") = 50, py::arg("points") = 256, py::arg("seed") = 0);
  auto scene = [](synthetic::LabeledCloud lc) { return std::make_pair(std::move(lc.cloud), std::move(lc.labeling)); };
  syn.def("make_chair", [=](int n, std::uint64_t seed) { return scene(synthetic::make_chair(n, seed)); },
          py::arg("points") = 1024, py::arg("seed") = 0);
  syn.def("make_two_wheels", [=](int n, std::uint64_t seed) { return scene(synthetic::make_two_wheels(n, seed)); },
          py::arg("points_per_wheel") = 256, py::arg("seed") = 0);
  syn.def("make_airplane", [=](int n, std::uint64_t seed, int engines) {
    return scene(synthetic::make_airplane(n, seed, engines));
  }, py::arg("points") = 1024, py::arg("seed") = 0, py::arg("engines") = 2);
  syn.def("make_motorbike", [=](int n, std::uint64_t seed) { return scene(synthetic::make_motorbike(n, seed)); },
          py::arg("points") = 1024, py::arg("seed") = 0);
}
