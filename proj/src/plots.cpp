#include "graphlasso/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "graphlasso/error.hpp"

namespace graphlasso::plots {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 48.0;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Maps data coordinates onto the plot area.
struct Frame {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        const double span = x_max > x_min ? x_max - x_min : 1.0;
        return kMargin + (x - x_min) / span * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        const double span = y_max > y_min ? y_max - y_min : 1.0;
        return kHeight - kMargin - (y - y_min) / span * (kHeight - 2 * kMargin);
    }
};

class Canvas {
public:
    Canvas(const std::string& title, const Frame& frame) : frame_(frame) {
        svg_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
             << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
             << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
        axes();
    }

    void line(double x1, double y1, double x2, double y2, const char* colour, double width = 1) {
        svg_ << "<line x1=\"" << frame_.px(x1) << "\" y1=\"" << frame_.py(y1) << "\" x2=\""
             << frame_.px(x2) << "\" y2=\"" << frame_.py(y2) << "\" stroke=\"" << colour
             << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void dot(double x, double y, const char* colour, double radius = 2.0) {
        svg_ << "<circle cx=\"" << frame_.px(x) << "\" cy=\"" << frame_.py(y) << "\" r=\""
             << radius << "\" fill=\"" << colour << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& points, const char* colour) {
        svg_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : points) svg_ << frame_.px(x) << ',' << frame_.py(y) << ' ';
        svg_ << "\"/>\n";
    }

    void legend(int row, const char* colour, const std::string& label) {
        const double y = 40.0 + 16.0 * row;
        svg_ << "<rect x=\"" << kWidth - 170 << "\" y=\"" << y - 9 << "\" width=\"10\" "
             << "height=\"10\" fill=\"" << colour << "\"/>\n"
             << "<text x=\"" << kWidth - 154 << "\" y=\"" << y << "\" font-family=\"sans-serif\" "
             << "font-size=\"11\">" << escape(label) << "</text>\n";
    }

    void save(const std::filesystem::path& path) {
        svg_ << "</svg>\n";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << svg_.str();
        if (!out) throw IoError("write failed for " + path.string());
    }

private:
    void axes() {
        const auto label = [this](double value, double x, double y, const char* anchor) {
            svg_ << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
                 << "\" font-family=\"sans-serif\" font-size=\"10\">" << value << "</text>\n";
        };
        svg_ << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
             << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
             << "\" fill=\"none\" stroke=\"black\"/>\n";
        label(frame_.y_min, kMargin - 4, kHeight - kMargin, "end");
        label(frame_.y_max, kMargin - 4, kMargin + 8, "end");
        label(frame_.x_min, kMargin, kHeight - kMargin + 14, "start");
        label(frame_.x_max, kWidth - kMargin, kHeight - kMargin + 14, "end");
    }

    Frame frame_;
    std::ostringstream svg_;
};

}  // namespace

void spectrum_svg(const Eigen::VectorXd& spectrum, const std::filesystem::path& path) {
    const double n = static_cast<double>(spectrum.size());
    const double top = spectrum.size() > 0 ? spectrum.maxCoeff() : 1.0;
    Canvas canvas("Laplacian spectrum", {0.0, std::max(n - 1, 1.0), 0.0, std::max(top, 1e-12)});
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        canvas.dot(static_cast<double>(i), spectrum[i], "steelblue");
    }
    canvas.save(path);
}

void recovery_svg(const Eigen::VectorXd& truth, const Eigen::VectorXd& recovered,
                  const std::string& title, const std::filesystem::path& path) {
    if (truth.size() != recovered.size()) throw InvalidArgument("recovery plot: size mismatch");
    double bound = std::max(truth.cwiseAbs().maxCoeff(), recovered.cwiseAbs().maxCoeff());
    if (!(bound > 0.0)) bound = 1.0;
    const double n = static_cast<double>(truth.size());
    Canvas canvas(title, {0.0, std::max(n - 1, 1.0), -bound, bound});
    canvas.line(0.0, 0.0, std::max(n - 1, 1.0), 0.0, "gray", 0.5);
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        const double x = static_cast<double>(i);
        if (truth[i] != 0.0) {
            canvas.line(x, 0.0, x, truth[i], "black");
            canvas.dot(x, truth[i], "black", 2.5);
        }
        if (recovered[i] != 0.0) canvas.dot(x, recovered[i], "crimson", 1.8);
    }
    canvas.legend(0, "black", "true x0");
    canvas.legend(1, "crimson", "recovered x");
    canvas.save(path);
}

bool energy_svg(const std::vector<TraceRow>& trace, const std::string& title,
                const std::filesystem::path& path) {
    if (trace.empty()) return false;
    double low = trace.front().total;
    double high = low;
    std::vector<std::pair<double, double>> points;
    for (const auto& row : trace) {
        low = std::min(low, row.total);
        high = std::max(high, row.total);
        points.emplace_back(static_cast<double>(row.outer), row.total);
    }
    if (high == low) high = low + 1.0;
    Canvas canvas(title, {points.front().first, std::max(points.back().first, 1.0), low, high});
    canvas.polyline(points, "darkgreen");
    for (const auto& [x, y] : points) canvas.dot(x, y, "darkgreen", 1.5);
    canvas.save(path);
    return true;
}

}  // namespace graphlasso::plots
