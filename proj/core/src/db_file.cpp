#include "cwpir/db_file.hpp"

#include <fstream>
#include <set>

namespace cwpir {

namespace {
constexpr std::uint32_t kDbMagic = 0x42445743;  // "CWDB"
constexpr std::uint8_t kDbVersion = 1;
}  // namespace

std::vector<std::uint8_t> serialize_db(const DbFileData& db) {
    ByteWriter w;
    w.u32(kDbMagic);
    w.u8(kDbVersion);
    w.u8(static_cast<std::uint8_t>(db.header.mode));
    w.u16(static_cast<std::uint16_t>(db.header.keyword_bits));
    w.u8(db.header.lossy ? 1 : 0);
    w.u64le(db.header.row_count);
    w.u32(db.header.plaintexts_per_row);
    w.u32(db.header.payload_bytes);
    w.str(db.header.preset);
    w.seed(db.header.lossy_seed);
    for (const auto& row : db.rows) {
        w.u32(static_cast<std::uint32_t>(row.key.size()));
        w.bytes(row.key);
        w.u32(static_cast<std::uint32_t>(row.payload.size()));
        w.bytes(row.payload);
    }
    return w.take();
}

DbFileData parse_db(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    if (r.u32() != kDbMagic) throw serialize_error("not a database file");
    if (r.u8() != kDbVersion) throw serialize_error("unsupported database version");
    DbFileData db;
    db.header.mode = static_cast<PirMode>(r.u8());
    db.header.keyword_bits = r.u16();
    db.header.lossy = r.u8() != 0;
    db.header.row_count = r.u64le();
    db.header.plaintexts_per_row = r.u32();
    db.header.payload_bytes = r.u32();
    db.header.preset = r.str();
    db.header.lossy_seed = r.seed();
    std::set<std::vector<std::uint8_t>> seen;
    for (u64 i = 0; i < db.header.row_count; ++i) {
        PirRow row;
        row.key = r.bytes(r.u32());
        row.payload = r.bytes(r.u32());
        if (db.header.mode == PirMode::keyword && !seen.insert(row.key).second) {
            throw serialize_error("duplicate key in database file");
        }
        db.rows.push_back(std::move(row));
    }
    if (!r.done()) throw serialize_error("trailing bytes in database file");
    return db;
}

void write_db_file(const std::string& path, const DbFileData& db) {
    const auto bytes = serialize_db(db);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

DbFileData read_db_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path);
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw std::runtime_error("short read from " + path);
    return parse_db(bytes);
}

}  // namespace cwpir
