#pragma once

#include <string>
#include <vector>

#include "cwpir/pir.hpp"
#include "cwpir/serialize.hpp"

namespace cwpir {

/// On-disk database container. Header fields pin everything the
/// server needs to run the offline setup; records are length-prefixed
/// key/payload pairs.
struct DbFileHeader {
    PirMode mode = PirMode::index;
    unsigned keyword_bits = 0;
    bool lossy = false;
    u64 row_count = 0;
    std::uint32_t plaintexts_per_row = 1;  // s
    std::uint32_t payload_bytes = 0;
    std::string preset = "paper-8192";
    Seed256 lossy_seed;
};

struct DbFileData {
    DbFileHeader header;
    std::vector<PirRow> rows;
};

std::vector<std::uint8_t> serialize_db(const DbFileData& db);
DbFileData parse_db(std::span<const std::uint8_t> data);

void write_db_file(const std::string& path, const DbFileData& db);
DbFileData read_db_file(const std::string& path);

}  // namespace cwpir
