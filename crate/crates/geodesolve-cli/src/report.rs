//! Aggregation of benchmark CSVs and SVG bar plots.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Vtx,
    Edge,
    Density,
    Formulation,
    GraphType,
    Gphsim,
}

impl GroupBy {
    pub fn parse(s: &str) -> Result<GroupBy, String> {
        Ok(match s {
            "vtx" => GroupBy::Vtx,
            "edge" => GroupBy::Edge,
            "density" => GroupBy::Density,
            "formulation" => GroupBy::Formulation,
            "graphtype" => GroupBy::GraphType,
            "gphsim" => GroupBy::Gphsim,
            other => return Err(format!("unknown group key `{other}`")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub instance: String,
    pub vertices: usize,
    pub edges: usize,
    pub density: f64,
    pub formulation: String,
    pub mde: Option<f64>,
    pub lde: Option<f64>,
    pub gphsim: Option<f64>,
    pub cpu_seconds: f64,
    pub status: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(format!(
                "line {}: expected 10 fields, got {}",
                i + 1,
                f.len()
            ));
        }
        let parse_opt = |s: &str| -> Option<f64> {
            if s.is_empty() {
                None
            } else {
                s.parse().ok()
            }
        };
        rows.push(CsvRow {
            instance: f[0].to_string(),
            vertices: f[1].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            edges: f[2].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            density: f[3].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            formulation: f[4].to_string(),
            mde: parse_opt(f[5]),
            lde: parse_opt(f[6]),
            gphsim: parse_opt(f[7]),
            cpu_seconds: f[8].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            status: f[9].to_string(),
        });
    }
    Ok(rows)
}

/// Group key for one row. Vertex counts snap to the nearest multiple of 10,
/// edge counts to the nearest 50, densities and similarity scores to the
/// nearest 0.1. The graph type is the leading alphabetic run of the
/// instance's file stem (so `Wmesh-3.json` groups under `Wmesh`).
pub fn group_key(row: &CsvRow, by: GroupBy) -> Option<String> {
    Some(match by {
        GroupBy::Vtx => format!("{}", 10 * ((row.vertices + 5) / 10)),
        GroupBy::Edge => format!("{}", 50 * ((row.edges + 25) / 50)),
        GroupBy::Density => format!("{:.1}", (row.density * 10.0).round() / 10.0),
        GroupBy::Formulation => row.formulation.clone(),
        GroupBy::GraphType => {
            let stem = Path::new(&row.instance)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(&row.instance);
            let ty: String = stem.chars().take_while(|c| c.is_alphabetic()).collect();
            if ty.is_empty() {
                return None;
            }
            ty
        }
        GroupBy::Gphsim => {
            let s = row.gphsim?;
            format!("{:.1}", (s * 10.0).round() / 10.0)
        }
    })
}

#[derive(Debug, Clone, Default)]
pub struct Aggregate {
    pub count: usize,
    pub mde: f64,
    pub lde: f64,
    pub cpu_seconds: f64,
}

/// Means per group over the rows that carry each measure.
pub fn aggregate(rows: &[CsvRow], by: GroupBy) -> BTreeMap<String, Aggregate> {
    #[derive(Default)]
    struct Acc {
        n: usize,
        mde_sum: f64,
        mde_n: usize,
        lde_sum: f64,
        lde_n: usize,
        cpu_sum: f64,
    }
    let mut groups: BTreeMap<String, Acc> = BTreeMap::new();
    for row in rows {
        let Some(key) = group_key(row, by) else {
            continue;
        };
        let acc = groups.entry(key).or_default();
        acc.n += 1;
        acc.cpu_sum += row.cpu_seconds;
        if let Some(m) = row.mde {
            acc.mde_sum += m;
            acc.mde_n += 1;
        }
        if let Some(l) = row.lde {
            acc.lde_sum += l;
            acc.lde_n += 1;
        }
    }
    groups
        .into_iter()
        .map(|(k, a)| {
            (
                k,
                Aggregate {
                    count: a.n,
                    mde: if a.mde_n > 0 {
                        a.mde_sum / a.mde_n as f64
                    } else {
                        f64::NAN
                    },
                    lde: if a.lde_n > 0 {
                        a.lde_sum / a.lde_n as f64
                    } else {
                        f64::NAN
                    },
                    cpu_seconds: a.cpu_sum / a.n as f64,
                },
            )
        })
        .collect()
}

pub fn aggregate_to_csv(groups: &BTreeMap<String, Aggregate>) -> String {
    let mut out = String::from("group,count,mde,lde,cpu_seconds\n");
    for (key, a) in groups {
        out.push_str(&format!(
            "{key},{},{:.6},{:.6},{:.3}\n",
            a.count, a.mde, a.lde, a.cpu_seconds
        ));
    }
    out
}

/// Grouped bar plot (mde, lde, cpu) as standalone SVG 1.1. `scale_cpu`
/// divides the CPU bars by 300 so they share an axis with the error bars.
pub fn render_svg(groups: &BTreeMap<String, Aggregate>, scale_cpu: bool) -> String {
    const BAR_W: f64 = 18.0;
    const GROUP_GAP: f64 = 24.0;
    const PLOT_H: f64 = 260.0;
    const MARGIN_L: f64 = 50.0;
    const MARGIN_TOP: f64 = 20.0;
    const LABEL_H: f64 = 70.0;

    let cpu_factor = if scale_cpu { 1.0 / 300.0 } else { 1.0 };
    let series = |a: &Aggregate| -> [f64; 3] {
        [
            if a.mde.is_nan() { 0.0 } else { a.mde },
            if a.lde.is_nan() { 0.0 } else { a.lde },
            a.cpu_seconds * cpu_factor,
        ]
    };
    let max_val = groups
        .values()
        .flat_map(|a| series(a).into_iter())
        .fold(1e-9f64, f64::max);

    let group_w = 3.0 * BAR_W + GROUP_GAP;
    let width = MARGIN_L + group_w * groups.len() as f64 + 20.0;
    let height = MARGIN_TOP + PLOT_H + LABEL_H;
    let colors = ["#4878a8", "#b85450", "#82b366"];
    let names = ["mde", "lde", if scale_cpu { "cpu/300" } else { "cpu" }];

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_L}\" y2=\"{:.1}\" stroke=\"#333\"/>\n",
        MARGIN_TOP + PLOT_H
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{:.1}\" x2=\"{width:.0}\" y2=\"{:.1}\" stroke=\"#333\"/>\n",
        MARGIN_TOP + PLOT_H,
        MARGIN_TOP + PLOT_H
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{max_val:.3}</text>\n",
        MARGIN_L - 4.0,
        MARGIN_TOP + 8.0
    ));

    for (gi, (key, a)) in groups.iter().enumerate() {
        let gx = MARGIN_L + GROUP_GAP / 2.0 + group_w * gi as f64;
        for (si, value) in series(a).into_iter().enumerate() {
            let h = PLOT_H * (value / max_val).clamp(0.0, 1.0);
            let x = gx + BAR_W * si as f64;
            let y = MARGIN_TOP + PLOT_H - h;
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{h:.1}\" fill=\"{}\"><title>{key} {}: {value:.6}</title></rect>\n",
                BAR_W - 2.0,
                colors[si],
                names[si]
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{key}</text>\n",
            gx + 1.5 * BAR_W,
            MARGIN_TOP + PLOT_H + 14.0
        ));
    }
    // legend
    for (si, name) in names.iter().enumerate() {
        let y = MARGIN_TOP + PLOT_H + 30.0 + 14.0 * si as f64;
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            y - 9.0,
            colors[si]
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"11\">{name}</text>\n",
            MARGIN_L + 14.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_csv() -> String {
        [
            "instance,vertices,edges,density,formulation,mde,lde,gphsim,cpu_seconds,status",
            "a/mesh-3.json,9,12,0.333333,quartic,0.100000000,0.050000000,,1.000,Optimal",
            "a/mesh-4.json,16,24,0.200000,quartic,0.300000000,0.200000000,,3.000,Optimal",
            "a/Wtorus-3.json,9,18,0.500000,system1,0.000000000,0.000000000,0.95,2.000,Optimal",
        ]
        .join("\n")
    }

    #[test]
    fn aggregates_match_hand_computation() {
        let rows = parse_csv(&sample_csv()).unwrap();
        let by_form = aggregate(&rows, GroupBy::Formulation);
        let q = &by_form["quartic"];
        assert_eq!(q.count, 2);
        assert!((q.mde - 0.2).abs() < 1e-12);
        assert!((q.cpu_seconds - 2.0).abs() < 1e-12);

        // vertices 9 and 16 both snap to 10 and 20
        let by_vtx = aggregate(&rows, GroupBy::Vtx);
        assert_eq!(by_vtx["10"].count, 2);
        assert_eq!(by_vtx["20"].count, 1);

        // edges all snap to 0 or 50? 12 -> 0, 24 -> 0, 18 -> 0
        let by_edge = aggregate(&rows, GroupBy::Edge);
        assert_eq!(by_edge["0"].count, 3);

        let by_type = aggregate(&rows, GroupBy::GraphType);
        assert_eq!(by_type["mesh"].count, 2);
        assert_eq!(by_type["Wtorus"].count, 1);

        let by_sim = aggregate(&rows, GroupBy::Gphsim);
        assert_eq!(by_sim.len(), 1);
        assert_eq!(by_sim["1.0"].count, 1); // 0.95 snaps to 1.0
    }

    #[test]
    fn single_row_aggregate_equals_row() {
        let csv = [
            "instance,vertices,edges,density,formulation,mde,lde,gphsim,cpu_seconds,status",
            "x.json,8,20,0.714286,system2,0.125000000,0.075000000,,4.500,Optimal",
        ]
        .join("\n");
        let rows = parse_csv(&csv).unwrap();
        let agg = aggregate(&rows, GroupBy::Formulation);
        let a = &agg["system2"];
        assert_eq!(a.count, 1);
        assert!((a.mde - 0.125).abs() < 1e-12);
        assert!((a.lde - 0.075).abs() < 1e-12);
        assert!((a.cpu_seconds - 4.5).abs() < 1e-12);
        let svg = render_svg(&agg, false);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<rect").count(), 3 + 3); // 3 bars + 3 legend chips
    }
}
