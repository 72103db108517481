#pragma once

#include <string_view>

#include "flame/io/xml.hpp"
#include "flame/model.hpp"
#include "flame/sugarscape/params.hpp"

namespace flame::sugarscape {

/// Citizen, Sugar and Averager agents exchanging location, request, eaten and
/// report messages. Identical to models/sugarscape.xml.
inline constexpr std::string_view kModelXml = R"xml(<xmodel>
  <name>sugarscape</name>
  <environment>
    <constants>
      <variable><type>double</type><name>viewing_distance</name><value>200</value></variable>
      <variable><type>double</type><name>eating_distance</name><value>5</value></variable>
      <variable><type>double</type><name>run_distance</name><value>5.5</value></variable>
      <variable><type>double</type><name>landscape_width</name><value>200</value></variable>
      <variable><type>double</type><name>landscape_height</name><value>200</value></variable>
    </constants>
  </environment>
  <agents>
    <xagent>
      <name>Citizen</name>
      <memory>
        <variable><type>int</type><name>id</name></variable>
        <variable><type>int</type><name>sugars</name></variable>
        <variable><type>double</type><name>x</name></variable>
        <variable><type>double</type><name>y</name></variable>
        <variable><type>int</type><name>sugars_collected</name></variable>
        <variable><type>int</type><name>flag_sugar_collected</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </memory>
      <functions>
        <function>
          <name>find_and_request</name>
          <inputs><input><messageName>location</messageName></input></inputs>
          <outputs><output><messageName>request</messageName></output></outputs>
        </function>
        <function>
          <name>confirm_eaten</name>
          <inputs><input><messageName>eaten</messageName></input></inputs>
          <outputs><output><messageName>report</messageName></output></outputs>
        </function>
      </functions>
    </xagent>
    <xagent>
      <name>Sugar</name>
      <memory>
        <variable><type>int</type><name>id</name></variable>
        <variable><type>double</type><name>x</name></variable>
        <variable><type>double</type><name>y</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </memory>
      <functions>
        <function>
          <name>post_location</name>
          <outputs><output><messageName>location</messageName></output></outputs>
        </function>
        <function>
          <name>check_eaten</name>
          <inputs><input><messageName>request</messageName></input></inputs>
          <outputs><output><messageName>eaten</messageName></output></outputs>
          <may_kill>true</may_kill>
        </function>
      </functions>
    </xagent>
    <xagent>
      <name>Averager</name>
      <memory>
        <variable><type>int</type><name>scene_id</name></variable>
        <variable><type>double</type><name>mean_collected</name></variable>
        <variable><type>int</type><name>max_collected</name></variable>
        <variable><type>int</type><name>total_collected</name></variable>
      </memory>
      <functions>
        <function>
          <name>collect</name>
          <inputs><input><messageName>report</messageName></input></inputs>
        </function>
      </functions>
    </xagent>
  </agents>
  <messages>
    <message>
      <name>location</name>
      <variables>
        <variable><type>int</type><name>id</name></variable>
        <variable><type>double</type><name>x</name></variable>
        <variable><type>double</type><name>y</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </variables>
    </message>
    <message>
      <name>request</name>
      <variables>
        <variable><type>int</type><name>sugar_id</name></variable>
        <variable><type>int</type><name>citizen_id</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </variables>
    </message>
    <message>
      <name>eaten</name>
      <variables>
        <variable><type>int</type><name>citizen_id</name></variable>
        <variable><type>double</type><name>x</name></variable>
        <variable><type>double</type><name>y</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </variables>
    </message>
    <message>
      <name>report</name>
      <variables>
        <variable><type>int</type><name>citizen_id</name></variable>
        <variable><type>int</type><name>sugars_collected</name></variable>
        <variable><type>int</type><name>scene_id</name></variable>
      </variables>
    </message>
  </messages>
</xmodel>
)xml";

inline ModelDef builtin_model() { return io::parse_model(kModelXml); }

inline ModelDef builtin_model(const ModelParams& params) {
  auto model = builtin_model();
  params.apply_to(model);
  return model;
}

}  // namespace flame::sugarscape
