#include <charconv>

#include "omdsc/algorithms/algorithms.hpp"
#include "omdsc/numerics/error.hpp"

namespace omdsc::algo {
namespace {

std::int64_t parse_int(std::string_view text, const std::string& spec) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::Parse, "bad integer in algorithm spec '" + spec + "'");
    }
    return v;
}

}  // namespace

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> make_algorithm(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    // split "k,key=value,..." into k and options
    std::string_view first = rest;
    std::vector<std::pair<std::string, std::string>> opts;
    if (auto comma = rest.find(','); comma != std::string::npos) {
        first = std::string_view(rest).substr(0, comma);
        std::string_view tail = std::string_view(rest).substr(comma + 1);
        while (!tail.empty()) {
            const auto next = tail.find(',');
            const auto item = tail.substr(0, next);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, "expected key=value in '" + spec + "'");
            opts.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
            tail = next == std::string_view::npos ? std::string_view() : tail.substr(next + 1);
        }
    }
    auto need_k = [&] {
        if (first.empty()) throw Error(ErrorKind::Parse, "algorithm '" + head + "' needs a k parameter");
        return parse_int(first, spec);
    };

    if (head == "immediate" && rest.empty()) return immediate<Num>();
    if (head == "tcp_ack" && rest.empty()) return tcp_ack<Num>();
    if (head == "ceil_div") {
        CounterReset reset = CounterReset::EveryMatch;
        for (const auto& [key, value] : opts) {
            if (key == "reset" && value == "flush") {
                reset = CounterReset::FlushOnly;
            } else if (key == "reset" && value == "every") {
                reset = CounterReset::EveryMatch;
            } else {
                throw Error(ErrorKind::Parse, "unknown ceil_div option '" + key + "=" + value + "'");
            }
        }
        return ceil_div<Num>(need_k(), reset);
    }
    if (head == "mar_ref" && opts.empty()) return mar_reference<Num>(need_k());
    if (head == "recurring") {
        const std::int64_t k = need_k();
        AlphaParam alpha = solve_alpha(k);
        for (const auto& [key, value] : opts) {
            if (key != "alpha") throw Error(ErrorKind::Parse, "unknown recurring option '" + key + "'");
            alpha = alpha_with_override(k, Rational::parse(value));
        }
        return recurring<Num>(alpha);
    }
    throw Error(ErrorKind::Parse, "unknown algorithm spec '" + spec + "'");
}

template std::unique_ptr<OnlineAlgorithm<Rational>> make_algorithm<Rational>(const std::string&);
template std::unique_ptr<OnlineAlgorithm<double>> make_algorithm<double>(const std::string&);

}  // namespace omdsc::algo
