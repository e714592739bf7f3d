//! GeoJSON `LineString` routes in the grid's local metric frame.

use super::{NavError, Route, WorldPoint};
use crate::terrain::DemGrid;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const LOCAL_CRS: &str = "local-meters";

/// Serialized form: a bare `LineString` geometry with two foreign members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoJsonRoute {
    #[serde(rename = "type")]
    pub kind: String,
    pub coordinates: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crs: Option<Value>,
}

impl GeoJsonRoute {
    pub fn points(&self) -> Vec<WorldPoint> {
        self.coordinates.iter().map(|[x, y]| WorldPoint::new(*x, *y)).collect()
    }
}

/// Cell centers of the route in world coordinates, pretty-printed.
pub fn route_to_geojson(route: &Route, grid: &DemGrid) -> String {
    let doc = GeoJsonRoute {
        kind: "LineString".into(),
        coordinates: route
            .cells
            .iter()
            .map(|c| {
                let (x, y) = grid.cell_center(*c);
                [x, y]
            })
            .collect(),
        total_cost: Some(route.total_cost),
        crs: Some(Value::String(LOCAL_CRS.into())),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain numbers serialize");
    s.push('\n');
    s
}

/// Parses a `LineString`, or a `Feature` / `FeatureCollection` whose first
/// geometry is one. Foreign members on the feature are honoured too.
pub fn route_from_geojson(text: &str) -> Result<GeoJsonRoute, NavError> {
    let value: Value = serde_json::from_str(text).map_err(|e| NavError::GeoJson(e.to_string()))?;
    let kind = value.get("type").and_then(Value::as_str).unwrap_or_default();
    let geometry = match kind {
        "LineString" => value.clone(),
        "Feature" => {
            let mut g = value
                .get("geometry")
                .cloned()
                .ok_or_else(|| NavError::GeoJson("feature has no geometry".into()))?;
            for key in ["total_cost", "crs"] {
                if let (Some(v), Some(obj)) = (value.get(key), g.as_object_mut()) {
                    obj.entry(key).or_insert(v.clone());
                }
            }
            g
        }
        "FeatureCollection" => {
            let first = value
                .get("features")
                .and_then(Value::as_array)
                .and_then(|f| f.first())
                .ok_or_else(|| NavError::GeoJson("empty feature collection".into()))?;
            return route_from_geojson(&first.to_string());
        }
        other => return Err(NavError::GeoJson(format!("unsupported type `{other}`"))),
    };
    let route: GeoJsonRoute =
        serde_json::from_value(geometry).map_err(|e| NavError::GeoJson(e.to_string()))?;
    if route.kind != "LineString" {
        return Err(NavError::GeoJson(format!("expected LineString, got `{}`", route.kind)));
    }
    if route.coordinates.is_empty() {
        return Err(NavError::GeoJson("LineString has no coordinates".into()));
    }
    Ok(route)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nav::{polyline_to_cells, GridIndex};

    #[test]
    fn round_trip_through_cells() {
        let g = DemGrid::new(8, 6, 1000.0, 5000.0, 60.0, -9999.0, vec![0.0; 48]).unwrap();
        let route = Route::new(
            vec![GridIndex::new(0, 5), GridIndex::new(1, 4), GridIndex::new(2, 4)],
            144.85281374238572,
        );
        let text = route_to_geojson(&route, &g);
        assert!(text.contains("\"crs\": \"local-meters\""));
        let doc = route_from_geojson(&text).unwrap();
        assert_eq!(doc.coordinates[0], [1030.0, 5030.0]);
        assert_eq!(doc.total_cost, Some(route.total_cost));
        assert_eq!(polyline_to_cells(&doc.points(), &g).unwrap(), route.cells);
    }

    #[test]
    fn accepts_features() {
        let text = r#"{"type":"Feature","properties":{},"total_cost":3.5,
            "geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}}"#;
        let doc = route_from_geojson(text).unwrap();
        assert_eq!(doc.coordinates.len(), 2);
        assert_eq!(doc.total_cost, Some(3.5));
        let fc = format!(r#"{{"type":"FeatureCollection","features":[{text}]}}"#);
        assert_eq!(route_from_geojson(&fc).unwrap(), doc);
    }

    #[test]
    fn rejects_other_geometries() {
        assert!(route_from_geojson(r#"{"type":"Point","coordinates":[0,0]}"#).is_err());
        assert!(route_from_geojson(r#"{"type":"LineString","coordinates":[]}"#).is_err());
        assert!(route_from_geojson("not json").is_err());
    }
}
