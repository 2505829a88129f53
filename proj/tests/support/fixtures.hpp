#pragma once

#include <tagcube/fact_store.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fixtures {

inline std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string table1_csv() { return read(std::string(TAGCUBE_DATA_DIR) + "/table1.csv"); }

inline tagcube::DatasetPtr table1() {
    const auto text = table1_csv();
    auto raw = std::make_shared<const tagcube::RawTable>(tagcube::parse_table(text));
    return tagcube::bind_schema(raw, {"location", "time", "salesman", "product"}, {"cost", "profit"},
                                tagcube::dataset_id_for(text, ',', true));
}

}  // namespace fixtures
