//! Bundled scenarios.

/// Pion decay 1.5 fm from a detector clocked at 1e-24 s; labeled tick 5.
pub const PIMESON: &str = include_str!("../presets/pimeson.scn");

/// Two decays into one detector, labeled ticks 5 and 9.
pub const TWO_FC: &str = include_str!("../presets/twofc.scn");

/// Two decays seen by detectors on clocks of different periods.
pub const TWO_CLOCK: &str = include_str!("../presets/twoclock.scn");

/// Mutually re-exciting pair; runs until the step budget is spent.
pub const SELFLOOP: &str = include_str!("../presets/selfloop.scn");

/// Three-stage relay whose first and last emissions are mirror images.
pub const CHAIN: &str = include_str!("../presets/chain.scn");

/// Every bundled scenario by name.
pub const ALL: [(&str, &str); 5] = [
    ("pimeson", PIMESON),
    ("twofc", TWO_FC),
    ("twoclock", TWO_CLOCK),
    ("selfloop", SELFLOOP),
    ("chain", CHAIN),
];

/// Looks a bundled scenario up by name.
pub fn by_name(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
