#pragma once

#include <string>

#include <json.hpp>

#include "bivarfun/certify.hpp"
#include "bivarfun/frechet.hpp"
#include "bivarfun/krylov.hpp"

namespace bivarfun::report {

using nlohmann::json;

json to_json(const Config& cfg);
json matrix_to_json(const ComplexMatrix& m);
json to_json(const fieldvals::Contour& g);
fieldvals::Contour contour_from_json(const json& j);
json to_json(const matfun::EvalMetadata& m);
json to_json(const certify::CertificateReport& r);
json to_json(const frechet::FrechetResult& r);
json to_json(const krylov::KrylovApproxResult& r);

/// One TSV row per certificate; `tsv_header()` gives the column names.
std::string tsv_header();
std::string tsv_row(const std::string& case_id, const certify::CertificateReport& r);

/// Versioned envelope: {"schema": "bivarfun-report/1", "generated_at": ...,
/// "body": {...}}. Two runs with identical inputs produce byte-identical
/// bodies; only the timestamp field differs.
json envelope(json body);

/// Serialize with sorted keys and a trailing newline ("" -> stdout).
void write_report(const json& doc, const std::string& path);

}  // namespace bivarfun::report
