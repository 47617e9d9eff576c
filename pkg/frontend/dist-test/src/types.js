/** Wire types for the play-service JSON HTTP interface. */
export {};
