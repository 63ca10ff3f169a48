use proptest::prelude::*;
use scatter_cli::config::*;
use scatter_cli::{CliError, Experiment, ExperimentConfig};
use scatter_core::propagation::ChannelConvention;
use scatter_core::random::Packet;
use scatter_core::ClusterId;

const CHANNELS: &str = "
[run]
experiment = channels
seed = 11
output = results/ch

[model]
v12 = poschl-teller
v12_strength = 2.0
v12_width = 1.0
v23 = gaussian
v23_strength = 1.5
v23_width = 0.5

[grid]
points = 256
half_extent = 128

[window]
lo = -0.5
hi = -0.25

[cutoff]
delta = 0.3
epsilon = 0.1
mu = 0.6

[schedule]
dt = 0.05
times = 1, 2, 4, 8

[packet]
electron = bound
photon = 10 0.6 10
";

fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::parse(text, None)
}

fn message(e: CliError) -> String {
    assert_eq!(e.exit_code(), 2, "{e}");
    e.to_string()
}

#[test]
fn channels_config_parses() {
    let c = parse(CHANNELS).unwrap();
    assert_eq!(c.experiment, Experiment::Channels);
    assert_eq!(c.seed, 11);
    let m = c.model.unwrap();
    assert_eq!(m.v13, Potential::ZERO);
    assert_eq!(m.v23.family, Family::Gaussian);
    assert_eq!(c.schedule.as_ref().unwrap().times, vec![1.0, 2.0, 4.0, 8.0]);
    let p = c.packet.unwrap();
    assert_eq!(p.electron, ElectronState::Bound);
    assert_eq!(p.photon, Packet::new(10.0, 0.6, 10.0));
    let cut = c.cutoff.unwrap();
    assert_eq!(cut.convention, ChannelConvention::Internal);
    assert_eq!(cut.smoothing, 0.1);
}

#[test]
fn round_trip_is_identity() {
    let c = parse(CHANNELS).unwrap();
    let again = parse(&c.to_ini_string()).unwrap();
    assert_eq!(again, c);
    assert_eq!(again.to_ini_string(), c.to_ini_string());
}

#[test]
fn hash_ignores_output_but_not_seed() {
    let c = parse(CHANNELS).unwrap();
    let mut d = c.clone();
    d.output = None;
    assert_eq!(c.hash(), d.hash());
    d.seed += 1;
    assert_ne!(c.hash(), d.hash());
    assert_eq!(c.hash().len(), 12);
}

#[test]
fn missing_grid_names_the_block() {
    let text = CHANNELS.replace("[grid]\npoints = 256\nhalf_extent = 128\n", "");
    let m = message(parse(&text).unwrap_err());
    assert!(m.contains("[grid]"), "{m}");
}

#[test]
fn unknown_key_reports_line() {
    let text = CHANNELS.replace("mu = 0.6", "mu = 0.6\nnu = 3");
    let m = message(parse(&text).unwrap_err());
    assert!(m.contains("[cutoff] nu: unknown key"), "{m}");
    let line = text.lines().position(|l| l == "nu = 3").unwrap() + 1;
    assert!(m.starts_with(&format!("line {line}:")), "{m}");
}

#[test]
fn unknown_section_rejected() {
    let m = message(parse(&format!("{CHANNELS}\n[extras]\na = 1\n")).unwrap_err());
    assert!(m.contains("unknown section [extras]"), "{m}");
}

#[test]
fn duplicate_key_rejected() {
    let m = message(parse(&CHANNELS.replace("dt = 0.05", "dt = 0.05\ndt = 0.1")).unwrap_err());
    assert!(m.contains("twice"), "{m}");
}

#[test]
fn bad_values_are_diagnosed() {
    for (from, to, needle) in [
        ("points = 256", "points = 200", "power of two"),
        ("half_extent = 128", "half_extent = -1", "positive"),
        ("hi = -0.25", "hi = -0.75", "must exceed lo"),
        ("delta = 0.3", "delta = 0.05", "delta"),
        ("times = 1, 2, 4, 8", "times = 1, 4, 2", "increasing"),
        (
            "photon = 10 0.6 10",
            "photon = 10 0.6",
            "center momentum width",
        ),
        ("v23 = gaussian", "v23 = square", "unknown family"),
        ("seed = 11", "seed = eleven", "nonnegative integer"),
    ] {
        let text = CHANNELS.replace(from, to);
        let m = message(parse(&text).unwrap_err());
        assert!(m.contains(needle), "{to}: {m}");
    }
}

#[test]
fn experiment_mismatch_rejected() {
    let e = ExperimentConfig::parse(CHANNELS, Some(Experiment::Evolve)).unwrap_err();
    assert!(message(e).contains("channels"));
}

#[test]
fn channels_needs_a_bound_electron() {
    let m = message(parse(&CHANNELS.replace("electron = bound", "electron = 0 1 2")).unwrap_err());
    assert!(m.contains("bound"), "{m}");
}

#[test]
fn dense_spectrum_size_checked() {
    let text = "[run]\nexperiment = spectrum\n[model]\nv12 = zero\n[grid]\npoints = 256\nhalf_extent = 16\n[spectrum]\noperator = full\nmethod = dense\n";
    let m = message(parse(text).unwrap_err());
    assert!(m.contains("dense needs at most"), "{m}");
    let ok = text.replace("operator = full", "operator = subsystem\ncluster = y_x0");
    let c = parse(&ok).unwrap();
    assert_eq!(
        c.spectrum.unwrap().operator,
        Operator::Subsystem(ClusterId::PhotonFree)
    );
}

#[test]
fn verify_all_needs_no_blocks() {
    let c = parse("[run]\nexperiment = verify-all\n").unwrap();
    assert_eq!(c.verify, None);
    let c =
        parse("[run]\nexperiment = verify-all\n[verify-all]\nprofile = smoke\ncriteria = 1, 14\n")
            .unwrap();
    assert_eq!(c.verify.unwrap().criteria, vec![1, 14]);
    assert!(parse("[run]\nexperiment = verify-all\n[verify-all]\ncriteria = 15\n").is_err());
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

fn potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        Just(Potential::ZERO),
        (finite(-5.0, 5.0), finite(0.1, 4.0)).prop_map(|(s, w)| Potential {
            family: Family::PoschlTeller,
            strength: s,
            width: w
        }),
        (finite(-5.0, 5.0), finite(0.1, 4.0)).prop_map(|(s, w)| Potential {
            family: Family::Gaussian,
            strength: s,
            width: w
        }),
    ]
}

fn packet() -> impl Strategy<Value = Packet> {
    (finite(-50.0, 50.0), finite(-3.0, 3.0), finite(0.1, 20.0))
        .prop_map(|(c, k, w)| Packet::new(c, k, w))
}

prop_compose! {
    fn dynamics_config()(
        seed in any::<u64>(),
        model in (potential(), potential(), potential()),
        log_points in 3u32..11,
        half in finite(1.0, 500.0),
        lo in finite(-3.0, -0.5),
        width in finite(0.01, 0.4),
        sharp in finite(1.0, 12.0),
        delta in finite(0.11, 2.0),
        mu in finite(0.51, 2.0),
        external in any::<bool>(),
        dt in finite(1e-3, 0.5),
        start in finite(1.0, 3.0),
        steps in prop::collection::vec(finite(0.01, 5.0), 1..6),
        electron in prop::option::of(packet()),
        photon in packet(),
    ) -> ExperimentConfig {
        let mut c = ExperimentConfig::empty(Experiment::Channels);
        c.seed = seed;
        c.model = Some(ModelBlock { v12: Potential { family: Family::PoschlTeller, ..model.0 }, v13: model.1, v23: model.2 });
        c.grid = Some(GridBlock { points: 1 << log_points, half_extent: half });
        c.window = Some(WindowBlock { lo, hi: lo + width, energy: None, sharpness: sharp });
        c.cutoff = Some(CutoffBlock {
            delta,
            epsilon: 0.1,
            mu,
            smoothing: 0.1,
            convention: if external { ChannelConvention::External } else { ChannelConvention::Internal },
        });
        let mut times = vec![start];
        for s in steps {
            times.push(times.last().unwrap() + s);
        }
        c.schedule = Some(ScheduleBlock { dt, duration: Some(times[times.len() - 1]), times });
        c.packet = Some(PacketBlock {
            electron: ElectronState::Bound,
            photon,
        });
        if let Some(e) = electron {
            c.experiment = Experiment::Evolve;
            c.packet = Some(PacketBlock { electron: ElectronState::Packet(e), photon });
        }
        c
    }
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(c in dynamics_config()) {
        c.validate().unwrap();
        let text = c.to_ini_string();
        let back = ExperimentConfig::parse(&text, None).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\n]{0,200}") {
        let _ = ExperimentConfig::parse(&text, None);
    }
}
