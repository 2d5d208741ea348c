//! CSV, SVG and configuration formats checked against independent readers.

use biocircuit::config::{parse_config, parse_config_bytes};
use biocircuit::csv::CsvTable;
use biocircuit::svg::{emit_svg, PlotStyle, Series};
use biocircuit_core::models::{build_plant, DisturbanceInputs, PlantParams, Schedule, Signal};
use biocircuit_core::{integrate, IntegratorConfig};
use proptest::prelude::*;

fn read_back(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn two_by_two_round_trips() {
    let mut t = CsvTable::new(["t", "x"]).unwrap();
    t.push(vec![0.1, 1.0 / 3.0]).unwrap();
    t.push(vec![2.0, -7.25e-300]).unwrap();
    let text = t.to_csv();
    assert_eq!(text, "t,x\n0.10000000000000001,0.33333333333333331\n2,-7.2500000000000006e-300\n");
    let (h, rows) = read_back(&text);
    assert_eq!(h, ["t", "x"]);
    assert_eq!(rows, t.rows());
}

proptest! {
    #[test]
    fn any_finite_table_round_trips(rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 3), 1..20)) {
        let mut t = CsvTable::new(["a", "b_1", "c2"]).unwrap();
        for r in &rows {
            t.push(r.clone()).unwrap();
        }
        let text = t.to_csv();
        prop_assert!(text.ends_with('\n') && !text.contains('\r') && !text.contains('"'));
        let (_, back) = read_back(&text);
        for (a, b) in back.iter().flatten().zip(rows.iter().flatten()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn plant_step_svg_has_two_series() {
    let dist = DisturbanceInputs {
        h_grn: Signal::Steps(Schedule::step(0.0, 1.0, 1.0)),
        ..Default::default()
    };
    let plant = build_plant(PlantParams::default(), dist).unwrap();
    let traj = integrate(&plant, &[0.0, 0.0], (0.0, 10.0), &IntegratorConfig::default().with_sample_dt(0.1)).unwrap();
    let series: Vec<Series> = (0..2)
        .map(|j| Series::new(traj.names()[j], traj.times().iter().copied().zip(traj.column(j)).collect()))
        .collect();
    let style = PlotStyle::new("unit plant step", "time", "level");
    let svg = emit_svg(&series, &style).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("viewBox=\"0 0 800 500\""));
    assert!(svg.contains(">m<") && svg.contains(">x<"));
    assert!(!svg.contains("href"));
    assert_eq!(svg, emit_svg(&series, &style).unwrap());
}

#[test]
fn config_diagnostics() {
    let plant = parse_config("[model]\nfamily = plant\n").unwrap();
    assert_eq!(plant.initial_state, [0.0, 0.0]);

    let e = parse_config("[model]\nfamily = plant\ngamma = -2\n").unwrap_err();
    assert_eq!(e.line, Some(3));
    assert!(e.message.contains("gamma") && e.message.contains("positive"), "{e}");

    let e = parse_config("[model]\nfamily = plant\nbeta = 1\n\nbeta = 2\n").unwrap_err();
    assert!(e.to_string().contains("lines 3 and 5"), "{e}");

    let e = parse_config("[model]\nfamily = ffwd\nvariant = microrna\nnot_a_key = 1\n").unwrap_err();
    assert_eq!(e.line, Some(4));

    let e = parse_config("[model]\nfamily = plant\n[disturbances]\nd1 = (0, 1), (0, 2)\n").unwrap_err();
    assert_eq!(e.line, Some(4));

    assert!(parse_config_bytes(&[0xff, 0xfe, 0x00]).is_err());
}
