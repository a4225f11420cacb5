//! Argument parsing. Every config key is also a global `--kebab-case` flag.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches};

use crate::commands::{run, Command};
use crate::config::{flag_name, read_config_file, Kind, Settings, KEYS};

pub fn command() -> clap::Command {
    let keys = KEYS.iter().map(|k| {
        let arg = Arg::new(k.name)
            .long(flag_name(k.name))
            .help(k.help)
            .global(true)
            .help_heading("Config keys (also accepted in the config file)");
        match k.kind {
            Kind::Bool => arg.value_name("BOOL").num_args(0..=1).default_missing_value("true"),
            Kind::Int => arg.value_name("INT"),
            Kind::Float => arg.value_name("X").allow_negative_numbers(true),
            Kind::Text => arg.value_name("TEXT"),
        }
    });
    let mut cmd = clap::Command::new("setler")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Simulate and analyse the forced Setler system")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .short('c')
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .global(true)
                .help("flat `key = value` config file; flags override it"),
        )
        .args(keys);
    for c in Command::ALL {
        cmd = cmd.subcommand(clap::Command::new(c.name()).about(c.about()));
    }
    cmd.arg(Arg::new("quiet").long("quiet").short('q').action(ArgAction::SetTrue).global(true).help("suppress the summary line"))
}

fn flag_values(m: &ArgMatches) -> BTreeMap<String, String> {
    KEYS.iter()
        .filter(|k| m.value_source(k.name) == Some(ValueSource::CommandLine))
        .filter_map(|k| m.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect()
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = Command::from_name(name).expect("registered subcommand");

    let file = match sub.get_one::<PathBuf>("config") {
        Some(path) => match read_config_file(path) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => BTreeMap::new(),
    };
    let settings = match Settings::merged(file, flag_values(sub)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    match run(cmd, &settings) {
        Ok(out) => {
            for k in settings.unused() {
                eprintln!("warning: key `{k}` is not used by `{}`", cmd.name());
            }
            if !sub.get_flag("quiet") {
                println!("{}", out.summary);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
