#include "igslam/splat_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "igslam/errors.hpp"

namespace igs {

namespace {
constexpr int kFloatsPerRecord = 14;
}

void save_gaussians(const std::string& path, const GaussianCloud& cloud) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "IGS1 " << cloud.size() << "\n";
    std::array<float, kFloatsPerRecord> rec;
    for (size_t i = 0; i < cloud.size(); ++i) {
        const Gaussian3D& g = cloud[i];
        rec = {static_cast<float>(g.position.x()), static_cast<float>(g.position.y()),
               static_cast<float>(g.position.z()), static_cast<float>(g.rotation.w()),
               static_cast<float>(g.rotation.x()), static_cast<float>(g.rotation.y()),
               static_cast<float>(g.rotation.z()), static_cast<float>(g.log_scale.x()),
               static_cast<float>(g.log_scale.y()), static_cast<float>(g.log_scale.z()),
               static_cast<float>(g.opacity_logit), static_cast<float>(g.color.x()),
               static_cast<float>(g.color.y()), static_cast<float>(g.color.z())};
        out.write(reinterpret_cast<const char*>(rec.data()), sizeof(rec));
    }
    if (!out) throw Error("failed writing " + path);
}

GaussianCloud load_gaussians(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::string magic;
    size_t count = 0;
    in >> magic >> count;
    if (magic != "IGS1") throw Error(path + ": not an IGS1 file");
    in.ignore(1);  // the newline terminating the header

    GaussianCloud cloud;
    std::array<float, kFloatsPerRecord> rec;
    for (size_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(rec.data()), sizeof(rec));
        if (!in) throw Error(path + ": truncated record " + std::to_string(i));
        Gaussian3D g;
        g.position = Vec3(rec[0], rec[1], rec[2]);
        g.rotation = Eigen::Quaterniond(rec[3], rec[4], rec[5], rec[6]).normalized();
        g.log_scale = Vec3(rec[7], rec[8], rec[9]);
        g.opacity_logit = rec[10];
        g.color = Vec3(rec[11], rec[12], rec[13]);
        cloud.add(g);
    }
    return cloud;
}

}  // namespace igs
