#include "eitfwm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace eitfwm {

namespace fs = std::filesystem;

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) return "0";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

ArtifactWriter::ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ValidationError("cannot create output directory " + dir_.string());
}

void ArtifactWriter::add(const std::string& file, const std::string& what) {
    for (auto& f : files_)
        if (f.first == file) {
            f.second = what;
            return;
        }
    files_.emplace_back(file, what);
}

namespace {
std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + p.string());
    return f;
}
}  // namespace

void ArtifactWriter::trace(const std::string& file, const TimeGrid& g, const std::vector<Column>& cols,
                           const std::string& what) {
    for (const auto& c : cols)
        if (c.second.size() != g.n) throw ValidationError("trace " + file + ": column " + c.first + " not on grid");
    auto f = open_out(dir_ / file);
    f << "t_us";
    for (const auto& c : cols) f << ',' << c.first << "_re," << c.first << "_im," << c.first << "_abs";
    f << '\n';
    for (std::size_t i = 0; i < g.n; ++i) {
        f << fmt_num(g.t(i));
        for (const auto& c : cols) {
            const cplx v = c.second[i];
            f << ',' << fmt_num(v.real()) << ',' << fmt_num(v.imag()) << ',' << fmt_num(std::abs(v));
        }
        f << '\n';
    }
    add(file, what);
}

void ArtifactWriter::table(const std::string& file, const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows, const std::string& what) {
    auto f = open_out(dir_ / file);
    for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
    f << '\n';
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw ValidationError("table " + file + ": ragged row");
        for (std::size_t k = 0; k < r.size(); ++k) f << (k ? "," : "") << fmt_num(r[k]);
        f << '\n';
    }
    add(file, what);
}

void ArtifactWriter::space_time(const std::string& file,
                                const std::vector<std::pair<std::string, const SpaceTimeField*>>& fields,
                                const std::string& what) {
    if (fields.empty()) return;
    const SpaceTimeField& ref = *fields.front().second;
    for (const auto& fd : fields)
        if (fd.second->nz != ref.nz || fd.second->t != ref.t)
            throw ValidationError("space-time dump " + file + ": fields on different grids");
    auto f = open_out(dir_ / file);
    f << "z,t_us";
    for (const auto& fd : fields) f << ',' << fd.first << "_re," << fd.first << "_im";
    f << '\n';
    for (std::size_t it = 0; it < ref.nt(); ++it)
        for (int iz = 0; iz <= ref.nz; ++iz) {
            f << fmt_num(double(iz) / ref.nz) << ',' << fmt_num(ref.t[it]);
            for (const auto& fd : fields) {
                const cplx v = fd.second->at(iz, it);
                f << ',' << fmt_num(v.real()) << ',' << fmt_num(v.imag());
            }
            f << '\n';
        }
    add(file, what);
}

void ArtifactWriter::json_file(const std::string& file, const json& j, const std::string& what) {
    auto f = open_out(dir_ / file);
    f << j.dump(2) << '\n';
    add(file, what);
}

void ArtifactWriter::manifest(const json& params) {
    json m;
    m["parameters"] = params;
    json list = json::array();
    for (const auto& [file, what] : files_) {
        std::error_code ec;
        const auto size = fs::file_size(dir_ / file, ec);
        list.push_back({{"file", file}, {"description", what}, {"bytes", ec ? 0 : size}});
    }
    list.push_back({{"file", "manifest.json"}, {"description", "this file"}});
    m["files"] = list;
    auto f = open_out(dir_ / "manifest.json");
    f << m.dump(2) << '\n';
}

}  // namespace eitfwm
