#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcog/core.hpp"

namespace fcog::instruction {

/// Same content as data/vocabulary.txt.
inline constexpr std::string_view kBuiltinVocabulary = R"(# Closed vocabularies for the instruction language.
# One token per line; a bracketed line starts a section.

[objects]
bottle
mug
toy car
apple
can
cup
book
teddy bear
ball
bowl
sponge
remote
box
vase

[colors]
red
white
blue
green
yellow
black
brown
pink

[materials]
wooden
plastic
metal
glass
ceramic

[furniture]
table
shelf
sofa
desk
cabinet
bed

[rooms]
living room
bedroom
kitchen
study
)";

struct Vocabulary {
    std::vector<std::string> objects;
    std::vector<std::string> colors;
    std::vector<std::string> materials;
    std::vector<std::string> furniture;
    std::vector<std::string> rooms;

    static bool in(const std::vector<std::string>& v, std::string_view t) {
        return std::find(v.begin(), v.end(), t) != v.end();
    }
    bool is_object(std::string_view t) const { return in(objects, t); }
    bool is_color(std::string_view t) const { return in(colors, t); }
    bool is_material(std::string_view t) const { return in(materials, t); }
    bool is_furniture(std::string_view t) const { return in(furniture, t); }
    bool is_room(std::string_view t) const { return in(rooms, t); }
    bool is_category(std::string_view t) const { return is_object(t) || is_furniture(t); }

    static Vocabulary parse(std::string_view text) {
        Vocabulary v;
        std::vector<std::string>* section = nullptr;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            if (line.front() == '[') {
                if (line == "[objects]") section = &v.objects;
                else if (line == "[colors]") section = &v.colors;
                else if (line == "[materials]") section = &v.materials;
                else if (line == "[furniture]") section = &v.furniture;
                else if (line == "[rooms]") section = &v.rooms;
                else throw Error("vocabulary line " + std::to_string(lineno) + ": unknown section " + line);
                continue;
            }
            if (!section) throw Error("vocabulary line " + std::to_string(lineno) + ": token outside a section");
            section->push_back(line);
        }
        return v;
    }

    static Vocabulary load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw Error("cannot open vocabulary file " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str());
    }

    static const Vocabulary& builtin() {
        static const Vocabulary v = parse(kBuiltinVocabulary);
        return v;
    }
};

}  // namespace fcog::instruction
