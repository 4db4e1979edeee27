#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "beamosc/errors.hpp"
#include "beamosc/perturbation.hpp"
#include "beamosc/twoparticle.hpp"

namespace beamosc {

namespace detail {

// Scientific notation with 17 significant digits via to_chars: locale-free,
// round-trips every double exactly, and is byte-stable across runs.
inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
    if (res.ec != std::errc{}) throw numeric_error("failed to format a number");
    return std::string(buf, res.ptr);
}

} // namespace detail

// Comma-separated output with a header row, LF line endings, and 17
// significant digits so repeated runs are byte-identical.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), columns_(columns.size()) {
        if (!out_) throw config_error("cannot open output file '" + path.string() + "'");
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) {
            throw config_error("CSV row width does not match the header");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    static std::string num(double value) { return detail::format_number(value); }
    static std::string integer(long long value) { return std::to_string(value); }

private:
    std::ofstream out_;
    std::size_t columns_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file '" + path.string() + "'");
    out << text;
}

inline nlohmann::ordered_json transition_to_json(const TransitionResult& tr,
                                                 const ScatteringKinematics& kin) {
    nlohmann::ordered_json j;
    j["p1"] = tr.p1;
    j["coefficient_re"] = tr.coefficient.real();
    j["coefficient_im"] = tr.coefficient.imag();
    j["k0"] = kin.k0;
    j["k1"] = kin.k1;
    j["delta_k"] = kin.delta_k;
    j["warnings"] = tr.warnings;
    return j;
}

inline nlohmann::ordered_json final_state_to_json(const FinalStateAmplitudes& s) {
    nlohmann::ordered_json j;
    j["c0_re"] = s.c0.real();
    j["c0_im"] = s.c0.imag();
    j["c1_re"] = s.c1.real();
    j["c1_im"] = s.c1.imag();
    j["k0"] = s.k0;
    j["k1"] = s.k1;
    j["e_total"] = s.e_total;
    j["normalization"] = "two-branch amplitudes rescaled by 1/sqrt(1 + p1) so that "
                         "|c0|^2 + |c1|^2 = 1";
    j["warnings"] = s.warnings;
    return j;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace beamosc
