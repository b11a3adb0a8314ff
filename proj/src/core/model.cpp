// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/model.hpp"

#include <cctype>

#include "smartmeter/core/errors.hpp"

namespace smartmeter {

std::string_view to_string(MeterMode mode) {
    return mode == MeterMode::prepaid ? "prepaid" : "postpaid";
}

MeterMode parse_meter_mode(std::string_view text) {
    if (text == "prepaid") {
        return MeterMode::prepaid;
    }
    if (text == "postpaid") {
        return MeterMode::postpaid;
    }
    throw ParseError("meter mode must be prepaid or postpaid, got '" + std::string(text) + "'");
}

bool is_valid_mac(std::string_view mac) {
    if (mac.size() != 17) {
        return false;
    }
    for (std::size_t i = 0; i < mac.size(); ++i) {
        if (i % 3 == 2) {
            if (mac[i] != ':') {
                return false;
            }
        } else if (!std::isxdigit(static_cast<unsigned char>(mac[i]))) {
            return false;
        }
    }
    return true;
}

bool is_valid_ipv4(std::string_view ip) {
    int octets = 0;
    while (true) {
        std::size_t digits = 0;
        int value = 0;
        while (digits < ip.size() && std::isdigit(static_cast<unsigned char>(ip[digits]))) {
            value = value * 10 + (ip[digits] - '0');
            ++digits;
        }
        if (digits == 0 || digits > 3 || value > 255) {
            return false;
        }
        ++octets;
        ip.remove_prefix(digits);
        if (ip.empty()) {
            return octets == 4;
        }
        if (ip.front() != '.' || octets == 4) {
            return false;
        }
        ip.remove_prefix(1);
    }
}

} // namespace smartmeter
