#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "tricons/knowledge_base.hpp"
#include "tricons/planner.hpp"

namespace tricons::testing {

inline const Catalog& test_catalog() {
    static const Catalog cat = default_catalog();
    return cat;
}

// Shipped defaults: probes=5, tolerance=1e-9, seed=1.
inline const KnowledgeBase& test_kb() {
    static const KnowledgeBase kb = derive_relations(test_catalog(), 5, 1e-9, 1);
    return kb;
}

inline const StepTable& test_table() {
    static const StepTable table(test_kb(), test_catalog());
    return table;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline Problem problem(const char* p1, const char* p2, const char* p3) {
    return Problem::from_names(test_catalog(), p1, p2, p3);
}

} // namespace tricons::testing
