#include "depthmark/annotation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "depthmark/error.hpp"

namespace depthmark {

Annotation load_annotation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation: " + path);

    Annotation a;
    bool saw_yaw = false;
    std::vector<int> seen_index;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq != std::string::npos && line.find(' ') == std::string::npos) {
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            if (key == "pose_yaw_deg") {
                try {
                    a.yaw_deg = std::stod(val);
                } catch (const std::exception&) {
                    throw FormatError(FormatFault::BadValue, path + ": bad yaw: " + val);
                }
                saw_yaw = true;
            } else if (key == "subset") {
                a.subset = val;
            } else {
                throw FormatError(FormatFault::BadHeader, path + ": unknown header key: " + key);
            }
            continue;
        }
        std::istringstream ss(line);
        int index, vis;
        std::string name;
        double x, y;
        if (!(ss >> index >> name >> x >> y >> vis) || (vis != 0 && vis != 1))
            throw FormatError(FormatFault::BadValue, path + ": bad record: " + line);
        seen_index.push_back(index);
        a.names.push_back(name);
        a.shape.points.emplace_back(x, y);
        a.shape.visible.push_back(static_cast<std::uint8_t>(vis));
    }
    if (!saw_yaw)
        throw FormatError(FormatFault::BadHeader, path + ": missing pose_yaw_deg header");
    for (std::size_t i = 0; i < seen_index.size(); ++i)
        if (seen_index[i] != static_cast<int>(i))
            throw FormatError(FormatFault::BadValue,
                              path + ": landmark indices must be 0..L-1 in order");
    return a;
}

void write_annotation(const Annotation& a, const std::string& path) {
    if (a.names.size() != a.shape.size())
        throw InvalidArgument("annotation name/landmark count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "pose_yaw_deg=%.6f\n", a.yaw_deg);
    out << buf;
    out << "subset=" << a.subset << "\n";
    for (std::size_t i = 0; i < a.shape.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu %s %.6f %.6f %d\n", i, a.names[i].c_str(),
                      a.shape.points[i].x(), a.shape.points[i].y(),
                      a.shape.visible[i] ? 1 : 0);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace depthmark
