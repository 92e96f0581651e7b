// Minimal deterministic SVG writer. Fixed 1000x600 viewport, every
// coordinate printed with 3 decimals, styling embedded as one <style> block,
// elements emitted in call order: identical draw sequences give identical
// bytes, which the artifact tests compare directly.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "glucast/util/encoding.hpp"

namespace glucast {

inline constexpr int kSvgWidth = 1000;
inline constexpr int kSvgHeight = 600;

/// Affine map from data space to pixel space. Pixel y grows downward, so
/// callers hand range_min = bottom pixel and range_max = top pixel for y.
struct LinearScale {
    double domain_min = 0.0;
    double domain_max = 1.0;
    double range_min = 0.0;
    double range_max = 1.0;

    double operator()(double v) const {
        const double span = domain_max - domain_min;
        const double t = span == 0.0 ? 0.5 : (v - domain_min) / span;
        return range_min + t * (range_max - range_min);
    }
};

class SvgCanvas {
public:
    explicit SvgCanvas(std::string style) : style_(std::move(style)) {}

    void line(double x1, double y1, double x2, double y2, const std::string& cls) {
        body_ += "<line class=\"" + cls + "\" x1=\"" + coord(x1) + "\" y1=\"" + coord(y1) +
                 "\" x2=\"" + coord(x2) + "\" y2=\"" + coord(y2) + "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& cls) {
        body_ += "<circle class=\"" + cls + "\" cx=\"" + coord(cx) + "\" cy=\"" + coord(cy) +
                 "\" r=\"" + coord(r) + "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& cls) {
        body_ += "<rect class=\"" + cls + "\" x=\"" + coord(x) + "\" y=\"" + coord(y) +
                 "\" width=\"" + coord(w) + "\" height=\"" + coord(h) + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& cls) {
        body_ += "<polyline class=\"" + cls + "\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0) body_ += ' ';
            body_ += coord(points[i].first) + "," + coord(points[i].second);
        }
        body_ += "\"/>\n";
    }

    void text(double x, double y, const std::string& content, const std::string& cls,
              const std::string& anchor = "start") {
        body_ += "<text class=\"" + cls + "\" x=\"" + coord(x) + "\" y=\"" + coord(y) +
                 "\" text-anchor=\"" + anchor + "\">" + escape(content) + "</text>\n";
    }

    std::string finish() const {
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                          std::to_string(kSvgWidth) + "\" height=\"" +
                          std::to_string(kSvgHeight) + "\" viewBox=\"0 0 " +
                          std::to_string(kSvgWidth) + " " + std::to_string(kSvgHeight) +
                          "\">\n<style>\n" + style_ + "</style>\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

    static std::string coord(double v) { return format_fixed(v, 3); }

    static std::string escape(const std::string& raw) {
        std::string out;
        for (char c : raw) {
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

private:
    std::string style_;
    std::string body_;
};

}  // namespace glucast
