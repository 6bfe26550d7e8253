#include "serialize.hpp"

namespace latcover::cli {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Lattice& lat) {
  Json j;
  j["dim"] = lat.dim();
  Json basis = Json::array();
  for (int r = 0; r < lat.dim(); ++r) {
    for (int c = 0; c < lat.dim(); ++c) basis.push_back(lat.basis()(r, c));
  }
  j["basis"] = basis;
  j["det"] = lat.det_abs();
  return j;
}

Json to_json(const ProductBody& body) {
  Json j;
  Json blocks = Json::array();
  for (const auto& b : body.blocks) blocks.push_back({b.dim, b.radius});
  j["blocks"] = blocks;
  j["scale"] = body.scale;
  Json translates = Json::array();
  for (const auto& t : body.translates) translates.push_back(to_json(t));
  j["translates"] = translates;
  return j;
}

Json to_json(const Interval& iv) { return Json{{"lo", iv.lo}, {"hi", iv.hi}, {"width", iv.width()}}; }

Json to_json(const DensityEstimate& est) {
  Json j;
  j["estimate"] = est.estimate;
  j["samples"] = est.samples;
  j["seed"] = est.seed;
  j["uncovered"] = est.uncovered;
  j["ci95_halfwidth"] = est.ci95_halfwidth;
  j["ci95_lower"] = est.ci95_lower;
  j["ci95_upper"] = est.ci95_upper;
  j["method"] = est.method;
  return j;
}

Json to_json(const CoverageCheck& check) {
  Json j;
  j["all_covered"] = check.all_covered;
  j["checked"] = check.checked;
  j["first_failure"] = check.first_failure ? to_json(*check.first_failure) : Json(nullptr);
  return j;
}

Json to_json(const RobustnessCertificate& cert) {
  Json j;
  j["verdict"] = std::string(to_string(cert.verdict));
  j["radius"] = cert.radius;
  j["grid_h"] = cert.grid_h;
  j["worst_deficit"] = cert.worst_deficit;
  j["margin"] = cert.margin;
  j["witness"] = cert.witness ? to_json(*cert.witness) : Json(nullptr);
  j["grid_points"] = cert.grid_points;
  j["refined_points"] = cert.refined_points;
  j["unresolved_cells"] = cert.unresolved_cells;
  j["finest_h"] = cert.finest_h;
  return j;
}

Json to_json(const MinRadiusResult& res) {
  Json j;
  j["bracket"] = to_json(res.bracket);
  j["steps"] = res.steps;
  j["inconclusive_steps"] = res.inconclusive_steps;
  j["hi_certificate"] = to_json(res.hi_certificate);
  return j;
}

Json to_json(const SearchResult& res) {
  Json j;
  j["lattice"] = to_json(res.lattice);
  j["radius"] = res.radius;
  j["density"] = res.density;
  j["bracket"] = to_json(res.bracket);
  j["iters"] = res.iters;
  j["screened_out"] = res.screened_out;
  j["certified"] = res.certified;
  j["improvements"] = res.improvements;
  j["baseline"] = res.baseline;
  return j;
}

Json to_json(const LiftOutcome& res) {
  Json j;
  j["tries"] = res.tries;
  j["threshold"] = res.threshold;
  j["estimate"] = to_json(res.estimate);
  j["robust"] = {{"name", res.lift.robust.name},
                 {"radius", res.lift.robust.radius},
                 {"density", res.lift.robust.density}};
  j["ys"] = to_json(res.lift.ys);
  j["lifted"] = to_json(res.lift.lifted);
  Json events = Json::array();
  for (const auto& e : res.events) {
    Json gens = Json::array();
    for (const auto& g : e.generators) gens.push_back(g);
    events.push_back({{"generators", gens}, {"passed", e.passed}, {"estimate", to_json(e.estimate)}});
  }
  j["events"] = events;
  return j;
}

Json to_json(const PipelineResult& res) {
  Json j;
  j["initial_source"] = res.initial_source;
  Json stages = Json::array();
  for (const auto& s : res.stages) {
    Json st;
    st["dim"] = s.dim;
    st["body"] = to_json(s.body);
    st["lattice"] = to_json(s.lattice);
    st["delta_estimate"] = to_json(s.delta_estimate);
    st["delta_target"] = s.delta_target;
    st["resamples"] = s.resamples;
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["final_lattice"] = to_json(res.final_lattice);
  j["final_body"] = to_json(res.final_body);
  j["expansion_threshold"] = res.expansion_threshold;
  j["expansion_hypothesis_met"] = res.expansion_hypothesis_met;
  j["coverage_check"] = to_json(res.coverage_check);
  j["ball_lattice"] = to_json(res.ball_lattice);
  j["ball_radius"] = res.ball_radius;
  j["final_density"] = res.final_density;
  return j;
}

Json to_json(const LemmaCheck& check) {
  Json j;
  j["name"] = check.name;
  j["passed"] = check.passed;
  Json m;
  for (const auto& [k, v] : check.metrics) m[k] = v;
  j["metrics"] = m;
  if (!check.note.empty()) j["note"] = check.note;
  return j;
}

}  // namespace latcover::cli
