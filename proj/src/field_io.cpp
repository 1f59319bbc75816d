#include "hessian/field_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hessian/hess.hpp"

namespace hessian {

namespace {

constexpr char kMagic[8] = {'H', 'E', 'S', 'S', 'F', 'L', 'D', '1'};

template <class T>
void put(std::array<unsigned char, 64>& buf, std::size_t at, T v) {
    std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <class T>
T get(const std::array<unsigned char, 64>& buf, std::size_t at) {
    T v;
    std::memcpy(&v, buf.data() + at, sizeof(T));
    return v;
}

}  // namespace

nlohmann::json domain_json(const GridDomain& g) {
    nlohmann::json j;
    j["shape"] = g.shape() == GridDomain::Shape::Ball ? "ball" : "box";
    j["n"] = g.n();
    j["h"] = g.h();
    j["half_extent"] = g.half_extent();
    j["side"] = g.side();
    j["interior_nodes"] = g.interior().size();
    j["boundary_nodes"] = g.boundary().size();
    j["inradius"] = g.inradius();
    if (g.shape() == GridDomain::Shape::Ball) j["radius"] = g.radius();
    else j["half_widths"] = std::vector<double>(g.half_widths().begin(), g.half_widths().end());
    j["axes"] = g.n() == 1 ? nlohmann::json::array({"x1", "y1"}) : nlohmann::json::array({"x1", "y1", "x2", "y2"});
    j["rho_normalization"] = std::isfinite(g.rho_normalization()) ? nlohmann::json(g.rho_normalization())
                                                                   : nlohmann::json(nullptr);
    nlohmann::json kap = nlohmann::json::object();
    for (int m = 1; m <= g.n(); ++m) kap[std::to_string(m)] = kappa(g.n(), m);
    j["kappa"] = kap;
    return j;
}

void write_field(const std::filesystem::path& path, const ScalarField& u, const nlohmann::json& extra, bool sidecar) {
    const GridDomain& g = u.grid();
    std::array<unsigned char, 64> hdr{};
    std::memcpy(hdr.data(), kMagic, 8);
    put<std::uint32_t>(hdr, 8, static_cast<std::uint32_t>(g.n()));
    put<std::uint32_t>(hdr, 12, static_cast<std::uint32_t>(g.real_dim()));
    for (int a = 0; a < 4; ++a)
        put<std::uint32_t>(hdr, 16 + 4 * static_cast<std::size_t>(a),
                           a < g.real_dim() ? static_cast<std::uint32_t>(g.side()) : 1u);
    put<double>(hdr, 32, g.h());
    put<double>(hdr, 40, -g.half_extent() * g.h());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(hdr.data()), 64);
    os.write(reinterpret_cast<const char*>(u.values().data()),
             static_cast<std::streamsize>(u.size() * sizeof(double)));
    if (sidecar) {
        nlohmann::json j = domain_json(g);
        j["format"] = "HESSFLD1";
        j["value_count"] = u.size();
        if (!extra.is_null()) j["metadata"] = extra;
        std::ofstream js(path.string() + ".json");
        js << j.dump(2) << '\n';
    }
}

FieldDump read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::array<unsigned char, 64> hdr{};
    is.read(reinterpret_cast<char*>(hdr.data()), 64);
    if (is.gcount() != 64 || std::memcmp(hdr.data(), kMagic, 8) != 0)
        throw std::runtime_error(path.string() + ": not a HESSFLD1 dump");
    FieldDump d;
    d.n = get<std::uint32_t>(hdr, 8);
    d.axes = get<std::uint32_t>(hdr, 12);
    std::size_t total = 1;
    for (std::size_t a = 0; a < 4; ++a) {
        d.counts[a] = get<std::uint32_t>(hdr, 16 + 4 * a);
        total *= d.counts[a];
    }
    d.h = get<double>(hdr, 32);
    d.origin = get<double>(hdr, 40);
    d.values.resize(total);
    is.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(total * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != total * sizeof(double))
        throw std::runtime_error(path.string() + ": truncated field dump");
    return d;
}

}  // namespace hessian
