// Fallback ambient declarations for environments without @types/papaparse
// and @types/yargs; the libraries themselves carry no bundled typings.
declare module "papaparse";
declare module "yargs";
