//! The diagram text format: JSON with fields `genus`, `vertices`, `curves`,
//! `arcs`, `regions`, `basepoints`, and optional `marks`.

use serde::{Deserialize, Serialize};

use super::{Family, Mesh, MeshBuilder};
use crate::diagram::{HeegaardDiagram, Marks};
use crate::error::ComplexError;
use crate::surface::{CurveId, RegionId};

#[derive(Serialize, Deserialize)]
pub struct ArcRepr {
    pub id: u32,
    pub curve: u32,
    /// [from, to]; null for a free loop.
    pub endpoints: Option<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
pub struct CurveRepr {
    pub id: u32,
    pub family: Family,
    /// Cyclic arc list: [arc id, +1 | -1].
    pub arcs: Vec<(u32, i8)>,
}

#[derive(Serialize, Deserialize)]
pub struct RegionRepr {
    pub id: u32,
    /// Boundary cycles of signed arc refs; a disk region has one cycle.
    pub boundary: Vec<Vec<(u32, i8)>>,
}

#[derive(Serialize, Deserialize)]
pub struct BasepointsRepr {
    pub z: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
}

#[derive(Serialize, Deserialize)]
pub struct MarksRepr {
    #[serde(rename = "Dstar")]
    pub dstar: u32,
    #[serde(rename = "Dstarstar")]
    pub dstarstar: u32,
    #[serde(rename = "Dz")]
    pub dz: u32,
    #[serde(rename = "Dw")]
    pub dw: u32,
}

#[derive(Serialize, Deserialize)]
pub struct DiagramRepr {
    pub genus: u32,
    pub vertices: Vec<u32>,
    pub curves: Vec<CurveRepr>,
    pub arcs: Vec<ArcRepr>,
    pub regions: Vec<RegionRepr>,
    pub basepoints: BasepointsRepr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marks: Option<MarksRepr>,
    /// Which curves are the alpha/beta attaching circles, in order.
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl HeegaardDiagram {
    pub fn to_repr(&self) -> DiagramRepr {
        let mesh = &self.mesh;
        DiagramRepr {
            genus: mesh.genus,
            vertices: mesh.vertices().map(|v| v.0).collect(),
            curves: mesh
                .curves
                .iter()
                .map(|(c, d)| CurveRepr {
                    id: c.0,
                    family: d.family,
                    arcs: d.word.iter().map(|&(a, f)| (a.0, if f { 1 } else { -1 })).collect(),
                })
                .collect(),
            arcs: mesh
                .arcs()
                .map(|(a, d)| ArcRepr {
                    id: a.0,
                    curve: d.curve.0,
                    endpoints: match (d.from, d.to) {
                        (Some(f), Some(t)) => Some([f.0, t.0]),
                        _ => None,
                    },
                })
                .collect(),
            regions: mesh
                .regions
                .keys()
                .map(|r| RegionRepr {
                    id: r.0,
                    boundary: mesh
                        .region_cycles(*r)
                        .into_iter()
                        .map(|cyc| {
                            cyc.into_iter()
                                .map(|h| (h.arc().0, if h.is_forward() { 1 } else { -1 }))
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
            basepoints: BasepointsRepr { z: self.z_region.0, w: self.w_region.map(|w| w.0) },
            marks: self.marks.as_ref().map(|m| MarksRepr {
                dstar: m.dstar.0,
                dstarstar: m.dstarstar.0,
                dz: m.dz.0,
                dw: m.dw.0,
            }),
            alpha: self.alpha.iter().map(|c| c.0).collect(),
            beta: self.beta.iter().map(|c| c.0).collect(),
        }
    }

    pub fn from_repr(repr: &DiagramRepr) -> Result<HeegaardDiagram, ComplexError> {
        let builder = MeshBuilder {
            genus: repr.genus,
            vertices: repr.vertices.clone(),
            arcs: repr
                .arcs
                .iter()
                .map(|a| {
                    let (f, t) = match a.endpoints {
                        Some([f, t]) => (Some(f), Some(t)),
                        None => (None, None),
                    };
                    (a.id, a.curve, f, t)
                })
                .collect(),
            curves: repr
                .curves
                .iter()
                .map(|c| {
                    (
                        c.id,
                        c.family,
                        c.arcs.iter().map(|&(a, s)| (a, s >= 0)).collect(),
                    )
                })
                .collect(),
            regions: repr
                .regions
                .iter()
                .map(|r| {
                    (
                        r.id,
                        r.boundary
                            .iter()
                            .map(|cyc| cyc.iter().map(|&(a, s)| (a, s >= 0)).collect())
                            .collect(),
                    )
                })
                .collect(),
        };
        let mesh: Mesh = builder.build()?;
        let diagram = HeegaardDiagram {
            mesh,
            alpha: repr.alpha.iter().map(|&c| CurveId(c)).collect(),
            beta: repr.beta.iter().map(|&c| CurveId(c)).collect(),
            z_region: RegionId(repr.basepoints.z),
            w_region: repr.basepoints.w.map(RegionId),
            marks: repr.marks.as_ref().map(|m| Marks {
                dstar: RegionId(m.dstar),
                dstarstar: RegionId(m.dstarstar),
                dz: RegionId(m.dz),
                dw: RegionId(m.dw),
            }),
        };
        Ok(diagram)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<HeegaardDiagram, ComplexError> {
        let repr: DiagramRepr =
            serde_json::from_str(text).map_err(|e| ComplexError::Serde(e.to_string()))?;
        HeegaardDiagram::from_repr(&repr)
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;

    #[test]
    fn roundtrip_lens_diagram() {
        let d = fixtures::lens_torus(3);
        let json = d.to_json();
        let back = crate::diagram::HeegaardDiagram::from_json(&json).unwrap();
        assert!(back.validate().ok());
        assert_eq!(back.to_json(), json);
    }
}
