#pragma once

#include "pgsynt/petri.hpp"

#include <string>
#include <vector>

namespace pgsynt {

// ---------------------------------------------------------------------------
// Scalable benchmark families.
//
//   AS  — alarm system: m secured locations, a burglar intrudes one of them;
//         every location must report the correct intrusion position.
//   CM  — concurrent machines: k orders pick among m machines, one of which
//         the environment declares defective; a machine serves at most one
//         order.
//   SR  — self-reconfiguring robots: m robots re-equip tools while the
//         environment destroys k of them.
//   JP  — job processing: a job visits an environment-chosen subset of m
//         processors in ascending order.
//   DW  — document workflow: m clerks must unanimously endorse or reject a
//         document handed to an environment-chosen clerk first.
//   DWs — document workflow, endorse-only variant.
// ---------------------------------------------------------------------------

enum class Family { kAS, kCM, kSR, kJP, kDW, kDWs };

struct BenchmarkSpec {
    Family family;
    int m = 1;
    int k = 1; // CM and SR only

    std::string name() const; // e.g. "as_2", "cm_3_1"
};

std::string family_name(Family f);
BenchmarkSpec parse_benchmark_spec(const std::string& text); // "as:2", "cm:3:1"

PetriGame generate(const BenchmarkSpec& spec);

struct CatalogRow {
    BenchmarkSpec spec;
    size_t tokens = 0;
    size_t places = 0;
    size_t transitions = 0;
};

CatalogRow catalog_row(const BenchmarkSpec& spec);
std::vector<CatalogRow> list_catalog(const std::vector<BenchmarkSpec>& specs);

} // namespace pgsynt
