#include "kerrosc/table.hpp"
#include "kerrosc/errors.hpp"
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace kerrosc {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& bytes)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(bytes));
    return buf;
}

std::string hash_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("hash_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return hash_hex(ss.str());
}

void TableWriter::meta(const std::string& key, const std::string& value)
{
    head_ += "# " + key + " = " + value + "\n";
}

void TableWriter::meta(const std::string& key, double value)
{
    meta(key, format_double(value));
}

void TableWriter::columns(const std::vector<std::string>& names)
{
    head_ += "#";
    for (const auto& n : names)
        head_ += " " + n;
    head_ += "\n";
    n_cols_ = names.size();
}

void TableWriter::row(const std::vector<double>& values)
{
    if (n_cols_ && values.size() != n_cols_)
        throw Error("TableWriter: row width does not match the column header");
    for (std::size_t i = 0; i < values.size(); i++) {
        if (i)
            body_ += '\t';
        body_ += format_double(values[i]);
    }
    body_ += '\n';
}

void TableWriter::row_text(const std::string& line)
{
    body_ += line;
    body_ += '\n';
}

std::string TableWriter::content() const
{
    return head_ + body_;
}

std::string TableWriter::write(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    std::string data = content();
    std::ofstream out(dir / name_, std::ios::binary);
    if (!out)
        throw Error("TableWriter: cannot write " + (dir / name_).string());
    out << data;
    return hash_hex(data);
}

std::string render_svg(const std::vector<SvgSeries>& series, const std::string& x_label,
                       const std::string& y_label, int width, int height)
{
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series) {
        for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
        for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
    }
    if (!(x_max > x_min)) { x_max = x_min + 1; }
    if (!(y_max > y_min)) { y_max = y_min + 1; }
    const int ml = 60, mr = 15, mt = 15, mb = 45;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
       << height - mb << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
       << "' stroke='black'/>\n";
    os << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 10
       << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
    os << "<text x='15' y='" << (mt + height - mb) / 2
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 15 "
       << (mt + height - mb) / 2 << ")'>" << y_label << "</text>\n";
    for (int k = 0; k <= 4; k++) {
        double xv = x_min + (x_max - x_min) * k / 4, yv = y_min + (y_max - y_min) * k / 4;
        os << "<text x='" << px(xv) << "' y='" << height - mb + 16
           << "' text-anchor='middle' font-size='10'>" << format_double(std::round(xv * 1e6) / 1e6)
           << "</text>\n";
        os << "<text x='" << ml - 5 << "' y='" << py(yv) + 3
           << "' text-anchor='end' font-size='10'>" << format_double(std::round(yv * 1e6) / 1e6)
           << "</text>\n";
    }
    int li = 0;
    for (const auto& s : series) {
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < s.x.size(); i++)
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        os << "'/>\n";
        if (!s.label.empty())
            os << "<text x='" << width - mr - 5 << "' y='" << mt + 14 + 14 * li++
               << "' text-anchor='end' font-size='11' fill='" << s.color << "'>" << s.label
               << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace kerrosc
