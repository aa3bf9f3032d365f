//! Result files: trajectories CSV, summary CSVs and an SVG plot.

use std::fmt::Write as _;
use std::io::Write;

use crate::calendar::Calendar;
use crate::domain::NUM_PARAMS;
use crate::error::Result;
use crate::num::Real;

use super::sim::{CohortRun, Trajectory};
use super::summary::Summary;

pub fn write_trajectories_csv<'a, T: Real + 'a, W: Write>(
    trajectories: impl IntoIterator<Item = &'a Trajectory<T>>,
    all_weights: bool,
    mut out: W,
) -> Result<()> {
    write!(out, "child_id,u_index,age_years,ns_weight,iarc")?;
    if all_weights {
        for i in 0..NUM_PARAMS {
            write!(out, ",w{i}")?;
        }
    }
    writeln!(out)?;
    for t in trajectories {
        for s in &t.samples {
            write!(
                out,
                "{},{},{:.6},{},{}",
                t.child_id,
                s.u_index,
                s.age_years.as_f64(),
                s.ns_weight,
                s.iarc
            )?;
            if all_weights {
                if let Some(w) = &s.weights {
                    for x in w {
                        write!(out, ",{x}")?;
                    }
                }
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn opt<D: std::fmt::Display>(v: Option<D>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per simulated child.
pub fn write_children_csv<T: Real, W: Write>(
    run: &CohortRun<T>,
    calendar: &Calendar<T>,
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "child_id,seed,status,m,c,converged,convergence_u,convergence_age,peak_ns,peak_u,peak_age,final_ns"
    )?;
    for child in &run.cohort.children {
        let growth = child.growth;
        let result = run
            .runs
            .iter()
            .find(|r| r.child_id == child.id)
            .map(|r| &r.result);
        write!(out, "{},{},", child.id, child.seed)?;
        match result {
            Some(Ok(t)) => {
                let conv_age = t
                    .convergence_u
                    .map(|u| calendar.age_at_utterance(u))
                    .transpose()?
                    .map(|a| format!("{:.4}", a.as_f64()));
                writeln!(
                    out,
                    "ok,{:e},{:e},{},{},{},{},{},{:.4},{}",
                    growth.m.as_f64(),
                    growth.c.as_f64(),
                    t.converged,
                    opt(t.convergence_u),
                    conv_age.unwrap_or_default(),
                    t.peak_ns,
                    t.peak_u,
                    calendar.age_at_utterance(t.peak_u)?.as_f64(),
                    t.final_ns()
                )?;
            }
            _ => writeln!(
                out,
                "failed,{:e},{:e},false,,,,,,",
                growth.m.as_f64(),
                growth.c.as_f64()
            )?,
        }
    }
    for ex in &run.cohort.excluded {
        writeln!(out, "{},,excluded,,,false,,,,,,", ex.id)?;
    }
    out.flush()?;
    Ok(())
}

/// Cohort statistics as `metric,value` rows.
pub fn write_summary_csv<T: Real, W: Write>(summary: &Summary<T>, mut out: W) -> Result<()> {
    writeln!(out, "metric,value")?;
    writeln!(out, "children,{}", summary.children)?;
    writeln!(out, "converged,{}", summary.converged)?;
    writeln!(out, "convergence_rate,{}", summary.convergence_rate)?;
    writeln!(out, "excluded,{}", summary.excluded)?;
    writeln!(out, "failed,{}", summary.failed)?;
    writeln!(out, "partial,{}", summary.is_partial())?;
    writeln!(out, "peak_ns_mean,{}", summary.peak_mean)?;
    writeln!(out, "peak_ns_min,{}", summary.peak_min)?;
    writeln!(out, "peak_ns_max,{}", summary.peak_max)?;
    writeln!(out, "final_ns_mean,{}", summary.final_ns_mean)?;
    let q = summary.speed_quantiles;
    writeln!(out, "convergence_u_q25,{}", opt(q.map(|q| q[0])))?;
    writeln!(out, "convergence_u_median,{}", opt(q.map(|q| q[1])))?;
    writeln!(out, "convergence_u_q75,{}", opt(q.map(|q| q[2])))?;
    writeln!(out, "fastest_child,{}", summary.fastest)?;
    writeln!(out, "median_child,{}", summary.median)?;
    writeln!(out, "slowest_child,{}", summary.slowest)?;
    out.flush()?;
    Ok(())
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

/// Line plot of NS weight against cumulative utterances with ticks every six
/// months from 2;6 to 4;0.
pub fn write_svg<'a, T: Real + 'a, W: Write>(
    trajectories: impl IntoIterator<Item = &'a Trajectory<T>>,
    calendar: &Calendar<T>,
    highlight: &[usize],
    mut out: W,
) -> Result<()> {
    let trajectories: Vec<&Trajectory<T>> = trajectories.into_iter().collect();
    let x_max = trajectories
        .iter()
        .filter_map(|t| t.samples.last().map(|s| s.u_index))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |u: f64| MARGIN + u / x_max * plot_w;
    let y = |w: f64| HEIGHT - MARGIN - w * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<g stroke="black" fill="none"><line x1="{m}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{m}" y1="{b}" x2="{m}" y2="{t}"/></g>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    )
    .unwrap();
    for i in 0..=4 {
        let w = i as f64 / 4.0;
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{w:.2}</text>"#,
            MARGIN - 6.0,
            y(w) + 4.0
        )
        .unwrap();
    }
    for (age, label) in [(2.5, "2;6"), (3.0, "3;0"), (3.5, "3;6"), (4.0, "4;0")] {
        let Ok(u) = calendar.cumulative_utterances(T::lit(age)) else {
            continue;
        };
        let px = x(u as f64);
        if u as f64 > x_max {
            continue;
        }
        writeln!(
            svg,
            r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#999" stroke-dasharray="4 4"/><text x="{px:.1}" y="{:.1}" font-size="12" text-anchor="middle">{label}</text>"##,
            MARGIN,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 18.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">utterances heard (age ticks)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="15" y="{:.1}" font-size="13" transform="rotate(-90 15 {:.1})" text-anchor="middle">NS weight</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    for t in &trajectories {
        let (color, width) = if highlight.contains(&t.child_id) {
            ("#c0392b", 2.0)
        } else {
            ("#2c7fb8", 0.8)
        };
        let points: Vec<String> = t
            .samples
            .iter()
            .map(|s| format!("{:.1},{:.1}", x(s.u_index as f64), y(s.ns_weight.as_f64())))
            .collect();
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" stroke-opacity="0.7" points="{}"><title>child {}</title></polyline>"#,
            points.join(" "),
            t.child_id
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes())?;
    out.flush()?;
    Ok(())
}
