#include <tagcube/wire.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tagcube {

std::string format_number(double value) {
    if (!std::isfinite(value)) {
        return "null";
    }
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, "%.6f", value);
    std::string out(buffer);
    while (out.back() == '0') {
        out.pop_back();
    }
    if (out.back() == '.') {
        out.pop_back();
    }
    if (out == "-0") {
        out = "0";
    }
    return out;
}

namespace {

std::string quoted(const std::string& text) {
    return nlohmann::json(text).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        case '\'':
            out += "&#39;";
            break;
        default:
            out.push_back(ch);
        }
    }
    return out;
}

}  // namespace

std::string to_wire_json(const CloudResult& result) {
    std::string out = "{\"version\":" + std::to_string(kWireVersion) + ",\"query\":" +
                      canonical_json(result.query) + ",\"permalink\":" + quoted(result.permalink) +
                      ",\"entries\":[";
    bool first = true;
    for (const auto& entry : result.layout.entries) {
        if (!first) {
            out.push_back(',');
        }
        first = false;
        switch (entry.kind) {
        case LayoutEntry::Kind::Tag:
            out += "{\"t\":" + quoted(entry.term) + ",\"w\":" + format_number(entry.weight) +
                   ",\"b\":" + std::to_string(entry.bucket) + "}";
            break;
        case LayoutEntry::Kind::Glued:
            out += "{\"hint\":\"glued\"}";
            break;
        case LayoutEntry::Kind::Permutable:
            out += "{\"hint\":\"permutable\"}";
            break;
        }
    }
    out += "]}";
    return out;
}

std::string render_embed_html(const CloudResult& result) {
    const int levels = std::max(1, result.query.buckets);
    std::string out =
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>tag cloud</title>\n<style>\n"
        ".cloud{font-family:sans-serif;line-height:1.5;padding:4px}\n"
        ".tag{margin:0 .2em;display:inline-block}\n"
        ".glued{white-space:nowrap;display:inline-block}\n";
    for (int b = 1; b <= levels; ++b) {
        const int px = levels == 1 ? 18 : 10 + (26 * (b - 1)) / (levels - 1);
        out += ".b" + std::to_string(b) + "{font-size:" + std::to_string(px) + "px}\n";
    }
    out += "</style></head><body>\n<div class=\"cloud\" data-permalink=\"" + html_escape(result.permalink) +
           "\">\n";

    const auto& entries = result.layout.entries;
    auto tag_span = [](const LayoutEntry& entry, bool permutable) {
        std::string span = "<span class=\"tag b" + std::to_string(entry.bucket) + "\" title=\"" +
                           format_number(entry.weight) + "\"";
        if (permutable) {
            span += " data-permutable=\"next\"";
        }
        return span + ">" + html_escape(entry.term) + "</span>";
    };
    for (std::size_t i = 0; i < entries.size();) {
        // A tag followed by GLUED tokens opens a run that must not break.
        std::size_t end = i + 1;
        while (end + 1 < entries.size() && entries[end].kind == LayoutEntry::Kind::Glued) {
            end += 2;
        }
        const bool run = end > i + 1;
        if (run) {
            out += "<span class=\"glued\">";
        }
        for (std::size_t j = i; j < end; j += 2) {
            const bool permutable = j + 1 < entries.size() && entries[j + 1].kind == LayoutEntry::Kind::Permutable;
            out += tag_span(entries[j], permutable);
            if (j + 2 < end) {
                out += " ";
            }
        }
        if (run) {
            out += "</span>";
        }
        out += "\n";
        i = end;
        if (i < entries.size() && entries[i].kind == LayoutEntry::Kind::Permutable) {
            ++i;
        }
    }
    out += "</div>\n</body></html>\n";
    return out;
}

std::string render_text(const CloudResult& result) {
    std::size_t width = 0;
    for (const auto& entry : result.layout.entries) {
        if (entry.is_tag()) {
            width = std::max(width, entry.term.size());
        }
    }
    std::string out;
    for (const auto& entry : result.layout.entries) {
        if (!entry.is_tag()) {
            continue;
        }
        out += entry.term;
        out.append(width - entry.term.size() + 2, ' ');
        const std::string weight = format_number(entry.weight);
        out.append(weight.size() < 12 ? 12 - weight.size() : 0, ' ');
        out += weight + "  " + std::string(static_cast<std::size_t>(std::max(entry.bucket, 0)), '*') + "\n";
    }
    return out;
}

}  // namespace tagcube
