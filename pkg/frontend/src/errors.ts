export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export class EmptySelection extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptySelection";
  }
}
