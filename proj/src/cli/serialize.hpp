#pragma once

#include <json.hpp>

#include "latcover/density.hpp"
#include "latcover/lattice.hpp"
#include "latcover/lemma_checks.hpp"
#include "latcover/lift.hpp"
#include "latcover/robust.hpp"

namespace latcover::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const Lattice& lat);
Json to_json(const ProductBody& body);
Json to_json(const Interval& iv);
Json to_json(const DensityEstimate& est);
Json to_json(const CoverageCheck& check);
Json to_json(const RobustnessCertificate& cert);
Json to_json(const MinRadiusResult& res);
Json to_json(const SearchResult& res);
Json to_json(const LiftOutcome& res);
Json to_json(const PipelineResult& res);
Json to_json(const LemmaCheck& check);

}  // namespace latcover::cli
